//! Finite metric spaces with exact rational distances and the constructions
//! that build new spaces from old ones: rescaling, max-powers, amalgamation
//! over a common subspace, one-point Katětov extensions and rational
//! snowflake approximants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{common_denominator_view, qi, sqrt_bracket, Q};

/// Which metric axiom a candidate matrix breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Diagonal,
    Positivity,
    Symmetry,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Diagonal => "diagonal",
            Axiom::Positivity => "positivity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("distance matrix is not square for {points} points")]
    NotSquare { points: usize },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("metric axiom violated ({kind}) at points {witness:?}")]
    AxiomViolation { kind: Axiom, witness: Vec<usize> },
    #[error("scale factor {r} does not exceed the largest distance {max}")]
    ScaleTooSmall { r: Q, max: Q },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("max-power exponent must be at least 1")]
    BadExponent,
    #[error("construction would exceed {0} points")]
    TooLarge(usize),
    #[error("amalgamation needs at least one member")]
    EmptyFamily,
    #[error("amalgamation needs a nonempty common subspace")]
    EmptyCommon,
    #[error("inconsistent amalgamation overlap: {0}")]
    InconsistentOverlap(String),
    #[error("not a Katětov map: violated at pair ({0}, {1})")]
    NotKatetov(usize, usize),
    #[error("Katětov value is zero at point {0}; the extension would duplicate it")]
    ZeroDistance(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("label {0:?} is already in use")]
    LabelInUse(String),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("snowflake tolerance too coarse to certify the triangle inequality at {0:?}")]
    MarginTooTight([usize; 3]),
}

/// A finite metric space: unique string labels and an exact distance matrix.
///
/// Distances are stored as indices into the sorted list of distinct values,
/// so spaces with thousands of points but few distinct distances stay
/// small. Values of this type always satisfy the metric axioms exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    /// Distinct distances in increasing order; every entry is used.
    values: Vec<Q>,
    /// Row-major indices into `values`.
    codes: Vec<u32>,
}

/// Sorts and deduplicates `values`, drops unused ones and rewrites `codes`.
fn canonicalize(values: Vec<Q>, mut codes: Vec<u32>) -> (Vec<Q>, Vec<u32>) {
    let mut used = vec![false; values.len()];
    for &c in &codes {
        used[c as usize] = true;
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&v| used[v]).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));
    let mut remap = vec![u32::MAX; values.len()];
    let mut sorted: Vec<Q> = Vec::with_capacity(order.len());
    for &v in &order {
        if sorted.last() != Some(&values[v]) {
            sorted.push(values[v].clone());
        }
        remap[v] = (sorted.len() - 1) as u32;
    }
    for c in codes.iter_mut() {
        *c = remap[*c as usize];
    }
    (sorted, codes)
}

/// Interns rationals, handing out codes in first-seen order.
#[derive(Default)]
pub(crate) struct Interner {
    index: BTreeMap<Q, u32>,
    values: Vec<Q>,
}

impl Interner {
    pub(crate) fn code(&mut self, v: Q) -> u32 {
        if let Some(&c) = self.index.get(&v) {
            return c;
        }
        let c = self.values.len() as u32;
        self.index.insert(v.clone(), c);
        self.values.push(v);
        c
    }

    pub(crate) fn into_values(self) -> Vec<Q> {
        self.values
    }
}

/// Machine integers used for the triangle check. Sums never overflow
/// because every entry is at most half the type's maximum.
trait Lane: Copy + Ord + TryFrom<i64> {
    fn plus(self, other: Self) -> Self;
}

macro_rules! lane {
    ($($t:ty),*) => {$(
        impl Lane for $t {
            #[inline(always)]
            fn plus(self, other: Self) -> Self {
                self.wrapping_add(other)
            }
        }
    )*};
}
lane!(u16, i32, i64);

/// Integer matrix of a space over the common denominator of its values, if
/// every sum of two entries fits in `T`.
fn integer_matrix<T: Lane>(values: &[Q], codes: &[u32]) -> Option<Vec<T>> {
    let ints = common_denominator_view(values)?;
    let mut table = Vec::with_capacity(ints.len());
    for &v in &ints {
        T::try_from(v.checked_mul(2)?).ok()?;
        table.push(T::try_from(v).ok()?);
    }
    Some(codes.iter().map(|&c| table[c as usize]).collect())
}

#[inline]
fn any_exceeds<T: Lane>(ik: &[T], jk: &[T], dij: T, strict: bool) -> bool {
    let mut hit = false;
    if strict {
        for (&a, &b) in ik.iter().zip(jk) {
            hit |= a >= dij.plus(b);
        }
    } else {
        for (&a, &b) in ik.iter().zip(jk) {
            hit |= a > dij.plus(b);
        }
    }
    hit
}

/// Whether some `i < k`, `j ∉ {i, k}` has `d(i,k) > d(i,j) + d(j,k)` (or
/// `≥` when `strict`). The matrix must be symmetric.
fn has_triangle_violation<T: Lane>(m: &[T], n: usize, strict: bool) -> bool {
    for i in 0..n {
        let ri = &m[i * n..(i + 1) * n];
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = ri[j];
            let rj = &m[j * n..(j + 1) * n];
            let lo = i + 1;
            let hit = if j < lo {
                any_exceeds(&ri[lo..], &rj[lo..], dij, strict)
            } else {
                any_exceeds(&ri[lo..j], &rj[lo..j], dij, strict)
                    || any_exceeds(&ri[j + 1..], &rj[j + 1..], dij, strict)
            };
            if hit {
                return true;
            }
        }
    }
    false
}

/// First `(i, j, k)` in the order `i < k`, then `j`, with a violation.
fn first_triangle_violation<T: Lane>(m: &[T], n: usize, strict: bool) -> Option<[usize; 3]> {
    for i in 0..n {
        for k in (i + 1)..n {
            let ik = m[i * n + k];
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = m[i * n + j].plus(m[j * n + k]);
                if ik > via || (strict && ik == via) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

fn triangle_violation_in<T: Lane>(m: Vec<T>, n: usize, strict: bool) -> Option<[usize; 3]> {
    if has_triangle_violation(&m, n, strict) {
        first_triangle_violation(&m, n, strict)
    } else {
        None
    }
}

impl FiniteMetricSpace {
    /// Checks every axiom exactly and returns the space, or the first
    /// violation found (diagonal, then positivity, symmetry, triangle).
    pub fn new(points: Vec<String>, dist: Vec<Vec<Q>>) -> Result<Self, MetricError> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(MetricError::NotSquare { points: n });
        }
        let flat = dist.into_iter().flatten().collect();
        Self::from_flat(points, flat)
    }

    pub fn from_fn(
        points: Vec<String>,
        mut d: impl FnMut(usize, usize) -> Q,
    ) -> Result<Self, MetricError> {
        let n = points.len();
        let mut interner = Interner::default();
        let mut codes = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                codes.push(interner.code(d(i, j)));
            }
        }
        Self::from_codes(points, interner.into_values(), codes)
    }

    fn from_flat(points: Vec<String>, dist: Vec<Q>) -> Result<Self, MetricError> {
        let n = points.len();
        if dist.len() != n * n {
            return Err(MetricError::NotSquare { points: n });
        }
        let mut interner = Interner::default();
        let codes = dist.into_iter().map(|d| interner.code(d)).collect();
        Self::from_codes(points, interner.into_values(), codes)
    }

    /// Builds a space from a value table and row-major indices into it,
    /// checking labels and every axiom. `values` need not be sorted or
    /// distinct.
    pub fn from_codes(points: Vec<String>, values: Vec<Q>, codes: Vec<u32>) -> Result<Self, MetricError> {
        let space = Self::from_codes_unchecked(points, values, codes)?;
        space.check_axioms()?;
        Ok(space)
    }

    /// As [`from_codes`](Self::from_codes) without the axiom check, for
    /// constructions that preserve the axioms by design.
    pub(crate) fn from_codes_unchecked(
        points: Vec<String>,
        values: Vec<Q>,
        codes: Vec<u32>,
    ) -> Result<Self, MetricError> {
        let n = points.len();
        if codes.len() != n * n {
            return Err(MetricError::NotSquare { points: n });
        }
        assert!(codes.iter().all(|&c| (c as usize) < values.len()), "distance code out of range");
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(MetricError::DuplicateLabel(p.clone()));
            }
        }
        let (values, codes) = canonicalize(values, codes);
        Ok(FiniteMetricSpace { points, values, codes })
    }

    fn check_axioms(&self) -> Result<(), MetricError> {
        let n = self.len();
        let violation = |kind, witness: Vec<usize>| MetricError::AxiomViolation { kind, witness };
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                return Err(violation(Axiom::Diagonal, vec![i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.d(i, j).is_positive() {
                    return Err(violation(Axiom::Positivity, vec![i, j]));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.code(i, j) != self.code(j, i) {
                    return Err(violation(Axiom::Symmetry, vec![i, j]));
                }
            }
        }
        if let Some([i, j, k]) = self.triangle_violation(false) {
            return Err(violation(Axiom::Triangle, vec![i, j, k]));
        }
        Ok(())
    }

    /// First `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`, or with `≥` when
    /// `strict` is set. Only distinct triples are examined.
    fn triangle_violation(&self, strict: bool) -> Option<[usize; 3]> {
        let n = self.len();
        if n < 3 {
            return None;
        }
        if let Some(m) = integer_matrix::<u16>(&self.values, &self.codes) {
            return triangle_violation_in(m, n, strict);
        }
        if let Some(m) = integer_matrix::<i32>(&self.values, &self.codes) {
            return triangle_violation_in(m, n, strict);
        }
        if let Some(m) = integer_matrix::<i64>(&self.values, &self.codes) {
            return triangle_violation_in(m, n, strict);
        }
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let via = self.d(i, j) + self.d(j, k);
                    let ik = self.d(i, k);
                    if *ik > via || (strict && *ik == via) {
                        return Some([i, j, k]);
                    }
                }
            }
        }
        None
    }

    /// Discrete metric (all distances 1) on the given labels.
    pub fn discrete(points: Vec<String>) -> Result<Self, MetricError> {
        Self::from_fn(points, |i, j| if i == j { Q::zero() } else { qi(1) })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn label_index(&self) -> BTreeMap<&str, usize> {
        self.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Q {
        &self.values[self.code(i, j) as usize]
    }

    /// Rank of `d(i, j)` among the distinct distances.
    #[inline]
    pub fn code(&self, i: usize, j: usize) -> u32 {
        self.codes[i * self.points.len() + j]
    }

    /// Distinct distances in increasing order (0 first when nonempty).
    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Row-major distance ranks, indices into [`values`](Self::values).
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn row_codes(&self, i: usize) -> &[u32] {
        let n = self.len();
        &self.codes[i * n..(i + 1) * n]
    }

    /// Rank of `v` among the distances, if it occurs.
    pub fn code_of(&self, v: &Q) -> Option<u32> {
        self.values.binary_search(v).ok().map(|c| c as u32)
    }

    pub fn to_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.d(i, j).clone()).collect()).collect()
    }

    pub fn diameter(&self) -> Q {
        self.values.last().cloned().unwrap_or_else(Q::zero)
    }

    /// Subspace on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> FiniteMetricSpace {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let mut codes = Vec::with_capacity(indices.len() * indices.len());
        for &i in indices {
            for &j in indices {
                codes.push(self.code(i, j));
            }
        }
        let (values, codes) = canonicalize(self.values.clone(), codes);
        FiniteMetricSpace { points, values, codes }
    }

    /// Every distance multiplied by a positive factor.
    pub fn dilate(&self, factor: &Q) -> Result<FiniteMetricSpace, MetricError> {
        if !factor.is_positive() {
            return Err(MetricError::NonPositive("dilation factor"));
        }
        Ok(FiniteMetricSpace {
            points: self.points.clone(),
            values: self.values.iter().map(|d| d * factor).collect(),
            codes: self.codes.clone(),
        })
    }

    /// Same distances under new (unique) labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<FiniteMetricSpace, MetricError> {
        if labels.len() != self.len() {
            return Err(MetricError::LengthMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        Self::from_codes_unchecked(labels, self.values.clone(), self.codes.clone())
    }

    pub fn is_isometry(&self, perm: &[usize]) -> bool {
        let n = self.len();
        perm.len() == n
            && (0..n).all(|i| (i + 1..n).all(|j| self.code(perm[i], perm[j]) == self.code(i, j)))
    }

    /// `Err((i, j, k))` names a distinct triple with `d(i,k) ≥ d(i,j) + d(j,k)`.
    pub fn check_strict_triangle(&self) -> Result<(), [usize; 3]> {
        match self.triangle_violation(true) {
            Some(t) => Err(t),
            None => Ok(()),
        }
    }
}

/// Builds a space from labels and a matrix, checking every axiom.
pub fn validate(points: Vec<String>, dist: Vec<Vec<Q>>) -> Result<FiniteMetricSpace, MetricError> {
    FiniteMetricSpace::new(points, dist)
}

/// Divides every distance by `r` so the result is strictly below 1. With
/// `None` the factor is twice the diameter (or 1 for a one-point space).
/// Returns the scaled space together with the factor used.
pub fn scale(space: &FiniteMetricSpace, r: Option<&Q>) -> Result<(FiniteMetricSpace, Q), MetricError> {
    let max = space.diameter();
    let r = match r {
        Some(r) => r.clone(),
        None if max.is_zero() => qi(1),
        None => &max * qi(2),
    };
    if r <= max || !r.is_positive() {
        return Err(MetricError::ScaleTooSmall { r, max });
    }
    let inv = Q::from_integer(1.into()) / &r;
    Ok((space.dilate(&inv)?, r))
}

/// Label of the tuple point `(x₁, …, xₙ)` in a max-power space.
pub fn tuple_label(space: &FiniteMetricSpace, xs: &[usize]) -> String {
    let mut s = String::from("t:");
    for (k, &x) in xs.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(space.label(x));
    }
    s
}

/// Decodes a mixed-radix tuple index (first coordinate most significant).
pub fn tuple_coords(index: usize, base: usize, n: usize) -> Vec<usize> {
    let mut coords = vec![0; n];
    let mut rest = index;
    for slot in coords.iter_mut().rev() {
        *slot = rest % base;
        rest /= base;
    }
    coords
}

pub fn tuple_index(coords: &[usize], base: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * base + c)
}

/// The max metric on `Xⁿ`; tuples are enumerated lexicographically by
/// point index and labelled `"t:x₁,…,xₙ"`.
pub fn power(space: &FiniteMetricSpace, n: usize) -> Result<FiniteMetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::BadExponent);
    }
    let k = space.len();
    let size = k.checked_pow(n as u32).ok_or(MetricError::TooLarge(usize::MAX))?;
    let tuples: Vec<Vec<usize>> = (0..size).map(|t| tuple_coords(t, k, n)).collect();
    let points = tuples.iter().map(|t| tuple_label(space, t)).collect();
    let mut codes = Vec::with_capacity(size * size);
    // Codes are ranks, so the largest code is the largest distance.
    for a in &tuples {
        for b in &tuples {
            codes.push(a.iter().zip(b).map(|(&x, &y)| space.code(x, y)).max().unwrap_or(0));
        }
    }
    let values = if space.values.is_empty() { vec![Q::zero()] } else { space.values.clone() };
    FiniteMetricSpace::from_codes_unchecked(points, values, codes)
}

/// Glues a family of spaces along the common label set `common`.
///
/// Within a member the member's distance is kept; across members the
/// distance is the shortest route through a common point. The output lists
/// the first member's points, then every further member's private points in
/// order.
pub fn amalgamate(family: &[FiniteMetricSpace], common: &[String]) -> Result<FiniteMetricSpace, MetricError> {
    if family.is_empty() {
        return Err(MetricError::EmptyFamily);
    }
    let common: Vec<&str> = {
        let mut seen = BTreeSet::new();
        common.iter().map(String::as_str).filter(|c| seen.insert(*c)).collect()
    };
    if common.is_empty() {
        return Err(MetricError::EmptyCommon);
    }
    let common_set: BTreeSet<&str> = common.iter().copied().collect();

    // Per member: local index of each common label, the common position of
    // each local point (if common), and the private point indices.
    let mut anchors: Vec<Vec<usize>> = Vec::with_capacity(family.len());
    let mut position: Vec<Vec<Option<usize>>> = Vec::with_capacity(family.len());
    let mut private: Vec<Vec<usize>> = Vec::with_capacity(family.len());
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (s, member) in family.iter().enumerate() {
        let index = member.label_index();
        let mut a = Vec::with_capacity(common.len());
        let mut pos = vec![None; member.len()];
        for (ci, c) in common.iter().enumerate() {
            match index.get(c) {
                Some(&i) => {
                    a.push(i);
                    pos[i] = Some(ci);
                }
                None => {
                    return Err(MetricError::InconsistentOverlap(format!(
                        "member {s} lacks common point {c:?}"
                    )))
                }
            }
        }
        let mut own = Vec::new();
        for (i, label) in member.points().iter().enumerate() {
            if common_set.contains(label.as_str()) {
                continue;
            }
            if let Some(&t) = owner.get(label.as_str()) {
                return Err(MetricError::InconsistentOverlap(format!(
                    "members {t} and {s} share {label:?} outside the common set"
                )));
            }
            owner.insert(label.as_str(), s);
            own.push(i);
        }
        anchors.push(a);
        position.push(pos);
        private.push(own);
    }

    // One value table for all members; `translate[s][c]` is the shared code
    // of member `s`'s code `c`.
    let mut interner = Interner::default();
    let translate: Vec<Vec<u32>> = family
        .iter()
        .map(|m| m.values.iter().map(|v| interner.code(v.clone())).collect())
        .collect();
    let shared = |s: usize, i: usize, j: usize| translate[s][family[s].code(i, j) as usize];

    let reference = &family[0];
    for (s, _) in family.iter().enumerate().skip(1) {
        for (ai, (&x0, &xs)) in anchors[0].iter().zip(&anchors[s]).enumerate() {
            for (bi, (&y0, &ys)) in anchors[0].iter().zip(&anchors[s]).enumerate() {
                if shared(0, x0, y0) != shared(s, xs, ys) {
                    return Err(MetricError::InconsistentOverlap(format!(
                        "member {s} disagrees on d({:?}, {:?})",
                        common[ai], common[bi]
                    )));
                }
            }
        }
    }

    // Layout: (member, local index) for every output point.
    let mut layout: Vec<(usize, usize)> = (0..reference.len()).map(|i| (0, i)).collect();
    for (s, own) in private.iter().enumerate().skip(1) {
        layout.extend(own.iter().map(|&i| (s, i)));
    }

    let total = layout.len();
    let points = layout.iter().map(|&(s, i)| family[s].points[i].clone()).collect();
    let mut codes = vec![0u32; total * total];
    for a in 0..total {
        for b in (a + 1)..total {
            let (s, i) = layout[a];
            let (t, j) = layout[b];
            let code = if s == t {
                shared(s, i, j)
            } else if let Some(cj) = position[t][j] {
                // A common endpoint is present in every member.
                shared(s, i, anchors[s][cj])
            } else if let Some(ci) = position[s][i] {
                shared(t, anchors[t][ci], j)
            } else {
                let best = anchors[s]
                    .iter()
                    .zip(&anchors[t])
                    .map(|(&as_, &at)| family[s].d(i, as_) + family[t].d(at, j))
                    .min()
                    .expect("common set is nonempty");
                interner.code(best)
            };
            codes[a * total + b] = code;
            codes[b * total + a] = code;
        }
    }
    let zero = interner.code(Q::zero());
    for a in 0..total {
        codes[a * total + a] = zero;
    }
    FiniteMetricSpace::from_codes(points, interner.into_values(), codes)
}

/// One block of a structured space: its point indices and the metric the
/// big space must reproduce on them (position `k` of `expected` corresponds
/// to `points[k]`).
#[derive(Debug, Clone)]
pub struct Block {
    pub points: Vec<usize>,
    pub expected: FiniteMetricSpace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RespectsViolation {
    /// A point lies in no block, in two blocks, or a block is malformed.
    NotPartition { point: usize },
    /// Distance inside block `block` differs from the expected metric.
    Intra { block: usize, i: usize, j: usize },
    /// Points of distinct blocks closer than 1.
    Cross { i: usize, j: usize },
}

/// Checks that `big` restricts to each block's expected metric and keeps
/// distinct blocks at distance at least 1.
pub fn respects_check(big: &FiniteMetricSpace, blocks: &[Block]) -> Result<(), RespectsViolation> {
    let n = big.len();
    let mut block_of = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.expected.len() != block.points.len() {
            let point = block.points.first().copied().unwrap_or(0);
            return Err(RespectsViolation::NotPartition { point });
        }
        for &p in &block.points {
            if p >= n || block_of[p] != usize::MAX {
                return Err(RespectsViolation::NotPartition { point: p });
            }
            block_of[p] = b;
        }
    }
    if let Some(point) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(RespectsViolation::NotPartition { point });
    }
    for (b, block) in blocks.iter().enumerate() {
        for (ki, &i) in block.points.iter().enumerate() {
            for (kj, &j) in block.points.iter().enumerate().skip(ki + 1) {
                if big.d(i, j) != block.expected.d(ki, kj) {
                    return Err(RespectsViolation::Intra { block: b, i, j });
                }
            }
        }
    }
    let one = qi(1);
    for i in 0..n {
        for j in (i + 1)..n {
            if block_of[i] != block_of[j] && big.d(i, j) < &one {
                return Err(RespectsViolation::Cross { i, j });
            }
        }
    }
    Ok(())
}

/// A positive Katětov function on a finite metric space: a recipe for a
/// new point at distance `values[x]` from each `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatetovMap {
    base: FiniteMetricSpace,
    values: Vec<Q>,
}

impl KatetovMap {
    pub fn new(base: FiniteMetricSpace, values: Vec<Q>) -> Result<Self, MetricError> {
        if values.len() != base.len() {
            return Err(MetricError::LengthMismatch {
                expected: base.len(),
                got: values.len(),
            });
        }
        for (x, v) in values.iter().enumerate() {
            if v.is_zero() {
                return Err(MetricError::ZeroDistance(x));
            }
            if v.is_negative() {
                return Err(MetricError::NotKatetov(x, x));
            }
        }
        for x in 0..base.len() {
            for y in (x + 1)..base.len() {
                let d = base.d(x, y);
                let gap = (&values[x] - &values[y]).abs();
                if &gap > d || d > &(&values[x] + &values[y]) {
                    return Err(MetricError::NotKatetov(x, y));
                }
            }
        }
        Ok(KatetovMap { base, values })
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }
}

/// The one-point extension realizing `f`; the new point is appended last.
pub fn extend_by_katetov(f: &KatetovMap, new_label: &str) -> Result<FiniteMetricSpace, MetricError> {
    let base = &f.base;
    if base.index_of(new_label).is_some() {
        return Err(MetricError::LabelInUse(new_label.to_string()));
    }
    let n = base.len();
    let mut points = base.points.clone();
    points.push(new_label.to_string());
    let mut values = base.values.clone();
    let offset = values.len() as u32;
    values.extend(f.values.iter().cloned());
    values.push(Q::zero());
    let zero = values.len() as u32 - 1;
    let mut codes = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..n {
        codes.extend_from_slice(base.row_codes(i));
        codes.push(offset + i as u32);
    }
    codes.extend((0..n).map(|j| offset + j as u32));
    codes.push(zero);
    FiniteMetricSpace::from_codes(points, values, codes)
}

/// Rational approximant of `√d` within `eps` of every true value.
///
/// Each entry is the midpoint of a certified bisection bracket of width
/// `eps` (exact when the distance is a rational square). The triangle
/// inequality of `√d` must hold with margin above `2·eps` on every distinct
/// triple, certified with brackets of width `eps/8`; the approximant then
/// satisfies it strictly.
pub fn snowflake(space: &FiniteMetricSpace, eps: &Q) -> Result<FiniteMetricSpace, MetricError> {
    if !eps.is_positive() {
        return Err(MetricError::NonPositive("eps"));
    }
    let n = space.len();
    let fine = eps / qi(8);
    let mut lo = vec![Q::zero(); n * n];
    let mut hi = vec![Q::zero(); n * n];
    let mut approx = vec![Q::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.d(i, j);
            let (l, h) = sqrt_bracket(d, eps);
            let mid = (l + h) / qi(2);
            let (fl, fh) = sqrt_bracket(d, &fine);
            for (a, b) in [(i, j), (j, i)] {
                approx[a * n + b] = mid.clone();
                lo[a * n + b] = fl.clone();
                hi[a * n + b] = fh.clone();
            }
        }
    }
    let margin = eps * qi(2);
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let slack = &lo[i * n + j] + &lo[j * n + k] - &hi[i * n + k];
                if slack <= margin {
                    return Err(MetricError::MarginTooTight([i, j, k]));
                }
            }
        }
    }
    FiniteMetricSpace::from_flat(space.points.clone(), approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use alloc::string::ToString;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn sym(names: &[&str], upper: &[Q]) -> FiniteMetricSpace {
        let n = names.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap().clone();
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        FiniteMetricSpace::new(labels(names), m).unwrap()
    }

    #[test]
    fn discrete_metric_is_valid() {
        let s = FiniteMetricSpace::discrete(labels(&["a", "b", "c"])).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.d(0, 2), &qi(1));
    }

    #[test]
    fn triangle_violation_reports_triple() {
        let m = vec![
            vec![qi(0), qi(1), qi(3)],
            vec![qi(1), qi(0), qi(1)],
            vec![qi(3), qi(1), qi(0)],
        ];
        let err = validate(labels(&["a", "b", "c"]), m).unwrap_err();
        assert_eq!(
            err,
            MetricError::AxiomViolation { kind: Axiom::Triangle, witness: vec![0, 1, 2] }
        );
    }

    #[test]
    fn asymmetry_and_diagonal_and_positivity() {
        let asym = vec![vec![qi(0), qi(1)], vec![qi(2), qi(0)]];
        assert!(matches!(
            validate(labels(&["a", "b"]), asym),
            Err(MetricError::AxiomViolation { kind: Axiom::Symmetry, .. })
        ));
        let diag = vec![vec![qi(1), qi(1)], vec![qi(1), qi(0)]];
        assert!(matches!(
            validate(labels(&["a", "b"]), diag),
            Err(MetricError::AxiomViolation { kind: Axiom::Diagonal, .. })
        ));
        let zero = vec![vec![qi(0), qi(0)], vec![qi(0), qi(0)]];
        assert!(matches!(
            validate(labels(&["a", "b"]), zero),
            Err(MetricError::AxiomViolation { kind: Axiom::Positivity, .. })
        ));
        let ragged = vec![vec![qi(0)], vec![qi(0), qi(0)]];
        assert!(matches!(validate(labels(&["a", "b"]), ragged), Err(MetricError::NotSquare { .. })));
        assert!(matches!(
            FiniteMetricSpace::discrete(labels(&["a", "a"])),
            Err(MetricError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn scale_rules() {
        let s = FiniteMetricSpace::discrete(labels(&["a", "b", "c"])).unwrap();
        let (half, r) = scale(&s, Some(&qi(2))).unwrap();
        assert_eq!(r, qi(2));
        assert!(half.values() == [Q::zero(), q(1, 2)]);
        let (auto, r) = scale(&s, None).unwrap();
        assert_eq!(r, qi(2));
        assert_eq!(auto, half);
        assert!(matches!(scale(&s, Some(&qi(1))), Err(MetricError::ScaleTooSmall { .. })));
        let single = FiniteMetricSpace::discrete(labels(&["a"])).unwrap();
        assert_eq!(scale(&single, None).unwrap().1, qi(1));
    }

    #[test]
    fn power_identity_and_max_rule() {
        let s = sym(&["a", "b"], &[qi(1)]);
        let p1 = power(&s, 1).unwrap();
        assert_eq!(p1.to_matrix(), s.to_matrix());
        let p2 = power(&s, 2).unwrap();
        assert_eq!(p2.len(), 4);
        assert_eq!(p2.points(), &labels(&["t:a,a", "t:a,b", "t:b,a", "t:b,b"])[..]);
        assert_eq!(p2.d(0, 3), &qi(1));
        assert_eq!(p2.d(0, 1), &qi(1));
        assert_eq!(power(&s, 0), Err(MetricError::BadExponent));
    }

    #[test]
    fn amalgamate_single_path() {
        let x1 = sym(&["A", "x"], &[qi(1)]);
        let x2 = sym(&["A", "y"], &[qi(2)]);
        let glued = amalgamate(&[x1, x2], &labels(&["A"])).unwrap();
        assert_eq!(glued.points(), &labels(&["A", "x", "y"])[..]);
        assert_eq!(glued.d(1, 2), &qi(3));
    }

    #[test]
    fn amalgamate_one_member_is_identity() {
        let x1 = sym(&["A", "x", "z"], &[qi(1), qi(1), qi(1)]);
        assert_eq!(amalgamate(&[x1.clone()], &labels(&["A"])).unwrap(), x1);
    }

    #[test]
    fn amalgamate_rejects_bad_overlaps() {
        let x1 = sym(&["A", "x"], &[qi(1)]);
        let x2 = sym(&["A", "x"], &[qi(1)]);
        assert!(matches!(
            amalgamate(&[x1.clone(), x2], &labels(&["A"])),
            Err(MetricError::InconsistentOverlap(_))
        ));
        let y1 = sym(&["A", "B", "x"], &[qi(1), qi(1), qi(1)]);
        let y2 = sym(&["A", "B", "y"], &[qi(2), qi(2), qi(2)]);
        assert!(matches!(
            amalgamate(&[y1, y2], &labels(&["A", "B"])),
            Err(MetricError::InconsistentOverlap(_))
        ));
        assert_eq!(amalgamate(&[x1], &[]), Err(MetricError::EmptyCommon));
        assert_eq!(amalgamate(&[], &labels(&["A"])), Err(MetricError::EmptyFamily));
    }

    #[test]
    fn respects_check_witnesses() {
        let s = sym(&["a", "b", "c", "d"], &[q(1, 2), qi(2), qi(2), qi(2), qi(2), q(1, 3)]);
        let b0 = Block { points: vec![0, 1], expected: sym(&["a", "b"], &[q(1, 2)]) };
        let b1 = Block { points: vec![2, 3], expected: sym(&["c", "d"], &[q(1, 3)]) };
        assert_eq!(respects_check(&s, &[b0.clone(), b1.clone()]), Ok(()));
        let wrong = Block { points: vec![2, 3], expected: sym(&["c", "d"], &[q(1, 4)]) };
        assert_eq!(
            respects_check(&s, &[b0.clone(), wrong]),
            Err(RespectsViolation::Intra { block: 1, i: 2, j: 3 })
        );
        let close = sym(&["a", "b", "c", "d"], &[q(1, 2), q(3, 4), qi(1), qi(1), qi(1), q(1, 3)]);
        assert_eq!(
            respects_check(&close, &[b0.clone(), b1]),
            Err(RespectsViolation::Cross { i: 0, j: 2 })
        );
        assert_eq!(
            respects_check(&s, &[b0]),
            Err(RespectsViolation::NotPartition { point: 2 })
        );
    }

    #[test]
    fn katetov_extensions() {
        let s = sym(&["a", "b", "c"], &[qi(1), qi(2), qi(1)]);
        let constant = KatetovMap::new(s.clone(), vec![qi(1); 3]).unwrap();
        let ext = extend_by_katetov(&constant, "new").unwrap();
        assert_eq!(ext.len(), 4);
        assert_eq!(ext.restrict(&[0, 1, 2]), s);
        assert!((0..3).all(|i| ext.d(3, i) == &qi(1)));

        let c = q(1, 3);
        let shifted: Vec<Q> = (0..3).map(|x| s.d(x, 0) + &c).collect();
        let ext = extend_by_katetov(&KatetovMap::new(s.clone(), shifted).unwrap(), "new").unwrap();
        assert_eq!(ext.d(3, 0), &c);

        assert_eq!(
            KatetovMap::new(s.clone(), vec![q(1, 2), qi(1), q(1, 2)]),
            Err(MetricError::NotKatetov(0, 2))
        );
        assert_eq!(
            KatetovMap::new(s.clone(), vec![qi(0), qi(1), qi(2)]),
            Err(MetricError::ZeroDistance(0))
        );
        assert_eq!(
            extend_by_katetov(&constant, "a"),
            Err(MetricError::LabelInUse("a".to_string()))
        );
    }

    #[test]
    fn snowflake_values() {
        let ones = FiniteMetricSpace::discrete(labels(&["a", "b", "c"])).unwrap();
        assert_eq!(snowflake(&ones, &q(1, 1000)).unwrap(), ones);
        let four = sym(&["a", "b"], &[qi(4)]);
        assert_eq!(snowflake(&four, &q(1, 1000)).unwrap().d(0, 1), &qi(2));
        let two = sym(&["a", "b", "c"], &[qi(2), qi(2), qi(2)]);
        let sf = snowflake(&two, &q(1, 1000)).unwrap();
        let v = sf.d(0, 1);
        assert!(*v >= q(1413, 1000) && *v <= q(1415, 1000));
        assert_eq!(snowflake(&two, &qi(0)), Err(MetricError::NonPositive("eps")));
        assert!(matches!(snowflake(&two, &qi(1)), Err(MetricError::MarginTooTight(_))));
    }

    #[test]
    fn strict_triangle_detection() {
        let line = sym(&["a", "b", "c"], &[qi(1), qi(2), qi(1)]);
        assert_eq!(line.check_strict_triangle(), Err([0, 1, 2]));
        let tri = FiniteMetricSpace::discrete(labels(&["a", "b", "c"])).unwrap();
        assert_eq!(tri.check_strict_triangle(), Ok(()));
    }
}
