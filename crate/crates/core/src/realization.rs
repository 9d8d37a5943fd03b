//! Realizing a prescribed group of isometries as the full isometry group of
//! a derived finite metric space.
//!
//! Given `(X, p)` with `p < 1` the construction lays out
//! `F = X×{0,…,n} ⊔ Xⁿ ⊔ {tag}`: `n + 1` labelled copies of `X`, the max
//! power `Xⁿ`, and one tag point. Copy 0 is tied to the diagonal of `Xⁿ`
//! and copy `j` to the `j`-th coordinate, so any isometry preserving the
//! copies acts diagonally. The tag sits at distance `c_j` from copy `j` and
//! at `c_{n+1}` from the orbit `D` of a seed tuple `z`, which pins the
//! copies and restricts the acting isometry to those moving `z` inside `D`.
//! When `z` is a base of `Iso(X, p)` that leaves exactly the prescribed
//! group.
//!
//! Point layout of every [`BlockSpace`] built here: copy 0, copy 1, …,
//! copy n (each in base order), then tuples in lexicographic order, then
//! the tag.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::group::{GroupError, Perm, PermutationGroup};
use crate::metric::{
    amalgamate, extend_by_katetov, power, respects_check, scale, tuple_coords, tuple_index, Block,
    FiniteMetricSpace, KatetovMap, MetricError,
};
use crate::rational::{qi, Q};
use crate::search::isometries;

/// Default bound on the number of points a realization may produce.
pub const DEFAULT_POINT_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealizationError {
    #[error("base metric must be strictly below 1 (found a distance of {0})")]
    NotScaled(Q),
    #[error("tuple arity must be at least 2 (got {0})")]
    BadArity(usize),
    #[error("seed tuple entry {0} is not a base point")]
    BadTuple(usize),
    #[error("group is not a subgroup of the isometry group: {0}")]
    NotSubgroup(String),
    #[error("realization needs {points} points, above the cap of {cap}")]
    SizeBound { points: usize, cap: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Structural role of a point in a gadget space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointLabel {
    /// `(x, j)`: base point `x` in copy `j`.
    Base { x: usize, copy: usize },
    /// `(x₁, …, xₙ)` in the max power.
    Tuple(Vec<usize>),
    Tag,
}

/// A gadget space together with the structure it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpace {
    pub space: FiniteMetricSpace,
    pub labels: Vec<PointLabel>,
    /// The space the copies replicate (after any final rescaling, the
    /// original unscaled space).
    pub base: FiniteMetricSpace,
    /// Tuple arity `n`; copies are indexed `0..=n`.
    pub arity: usize,
    /// `c_0, …, c_{n+1}` in gadget units; empty when there is no tag.
    pub constants: Vec<Q>,
    /// Factor by which gadget distances were multiplied at the end.
    pub scale: Q,
    /// Seed tuple `z` whose orbit the tag marks.
    pub seed: Option<Vec<usize>>,
}

impl BlockSpace {
    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn has_tag(&self) -> bool {
        matches!(self.labels.last(), Some(PointLabel::Tag))
    }

    pub fn tag_index(&self) -> Option<usize> {
        self.has_tag().then(|| self.labels.len() - 1)
    }

    /// Index of a label under the canonical layout.
    pub fn index_of(&self, label: &PointLabel) -> Option<usize> {
        let k = self.base_len();
        let copies = k * (self.arity + 1);
        let idx = match label {
            PointLabel::Base { x, copy } if *x < k && *copy <= self.arity => copy * k + x,
            PointLabel::Tuple(xs) if xs.len() == self.arity && xs.iter().all(|&x| x < k) => {
                copies + tuple_index(xs, k)
            }
            PointLabel::Tag if self.has_tag() => self.labels.len() - 1,
            _ => return None,
        };
        (self.labels.get(idx) == Some(label)).then_some(idx)
    }

    /// The extension `û` of a base permutation: `u` on every copy, `u`
    /// coordinatewise on tuples, identity on the tag.
    pub fn hat(&self, u: &Perm) -> Perm {
        let images = self
            .labels
            .iter()
            .map(|label| {
                let moved = match label {
                    PointLabel::Base { x, copy } => PointLabel::Base { x: u.apply(*x), copy: *copy },
                    PointLabel::Tuple(xs) => PointLabel::Tuple(u.act_on_tuple(xs)),
                    PointLabel::Tag => PointLabel::Tag,
                };
                self.index_of(&moved).expect("layout is closed under hats")
            })
            .collect();
        Perm::new(images).expect("hat of a permutation is a permutation")
    }

    /// The gadget metric before the final rescaling.
    pub fn gadget_metric(&self) -> FiniteMetricSpace {
        if self.scale.is_one() {
            self.space.clone()
        } else {
            self.space.dilate(&(Q::one() / &self.scale)).expect("positive scale")
        }
    }
}

fn base_label(space: &FiniteMetricSpace, x: usize, copy: usize) -> String {
    format!("b:{},{}", space.label(x), copy)
}

fn check_scaled(p: &FiniteMetricSpace) -> Result<(), RealizationError> {
    let diam = p.diameter();
    if diam >= Q::one() {
        return Err(RealizationError::NotScaled(diam));
    }
    Ok(())
}

/// Copy `copy` of `p` next to the given tuples (max metric among them),
/// with `(x, tuple)` at distance `1 + p(x, partner(tuple))`.
fn linked_space(
    p: &FiniteMetricSpace,
    copy: usize,
    tuples: &[Vec<usize>],
    tuple_labels: &[String],
    partner: impl Fn(&[usize]) -> usize,
) -> Result<FiniteMetricSpace, MetricError> {
    let k = p.len();
    let mut labels: Vec<String> = (0..k).map(|x| base_label(p, x, copy)).collect();
    labels.extend(tuple_labels.iter().cloned());
    let mut values = p.values().to_vec();
    let shift = values.len() as u32;
    values.extend(p.values().iter().map(|v| Q::one() + v));
    let partners: Vec<usize> = tuples.iter().map(|t| partner(t)).collect();
    let total = labels.len();
    let mut codes = Vec::with_capacity(total * total);
    for a in 0..total {
        for b in 0..total {
            codes.push(match (a < k, b < k) {
                (true, true) => p.code(a, b),
                (false, false) => {
                    let (s, t) = (&tuples[a - k], &tuples[b - k]);
                    s.iter().zip(t).map(|(&x, &y)| p.code(x, y)).max().unwrap_or(0)
                }
                (true, false) => shift + p.code(a, partners[b - k]),
                (false, true) => shift + p.code(b, partners[a - k]),
            });
        }
    }
    // A metric by construction: links lie in [1, 2) and obey the triangle
    // inequality of p, while tuples and copy points stay within 1 of each
    // other. The amalgamated result is validated in full.
    FiniteMetricSpace::from_codes_unchecked(labels, values, codes)
}

fn canonical_labels(p: &FiniteMetricSpace, n: usize, with_tag: bool) -> (Vec<PointLabel>, Vec<String>) {
    let k = p.len();
    let mut labels = Vec::new();
    let mut names = Vec::new();
    for copy in 0..=n {
        for x in 0..k {
            labels.push(PointLabel::Base { x, copy });
            names.push(base_label(p, x, copy));
        }
    }
    for t in 0..k.pow(n as u32) {
        let xs = tuple_coords(t, k, n);
        names.push(crate::metric::tuple_label(p, &xs));
        labels.push(PointLabel::Tuple(xs));
    }
    if with_tag {
        labels.push(PointLabel::Tag);
        names.push("tag".to_string());
    }
    (labels, names)
}

fn reorder(space: &FiniteMetricSpace, names: &[String]) -> FiniteMetricSpace {
    let index = space.label_index();
    let order: Vec<usize> = names.iter().map(|n| index[n.as_str()]).collect();
    space.restrict(&order)
}

/// The copies-and-tuples gadget on `X×{0,…,n} ⊔ Xⁿ`.
///
/// Copy 0 is linked to the diagonal by `1 + p(x, a)` and amalgamated with
/// `Xⁿ` over the diagonal; copy `j ≥ 1` is linked to every tuple by
/// `1 + p(x, x_j)`; all of these are then amalgamated over `Xⁿ`.
pub fn copy_gadget(p: &FiniteMetricSpace, n: usize) -> Result<BlockSpace, RealizationError> {
    check_scaled(p)?;
    if n < 2 {
        return Err(RealizationError::BadArity(n));
    }
    let k = p.len();
    let count = k.checked_pow(n as u32).ok_or(MetricError::TooLarge(usize::MAX))?;
    let tuples: Vec<Vec<usize>> = (0..count).map(|t| tuple_coords(t, k, n)).collect();
    let power_space = power(p, n)?;
    let tuple_labels: Vec<String> = power_space.points().to_vec();
    let diagonal: Vec<usize> = (0..k).map(|a| tuple_index(&vec![a; n], k)).collect();
    let diag_tuples: Vec<Vec<usize>> = diagonal.iter().map(|&t| tuples[t].clone()).collect();
    let diag_labels: Vec<String> = diagonal.iter().map(|&t| tuple_labels[t].clone()).collect();
    let copy0_diag = linked_space(p, 0, &diag_tuples, &diag_labels, |t| t[0])?;
    let lambda0 = amalgamate(&[copy0_diag, power_space], &diag_labels)?;

    let mut family = vec![lambda0];
    for j in 1..=n {
        family.push(linked_space(p, j, &tuples, &tuple_labels, |t| t[j - 1])?);
    }
    let lambda = amalgamate(&family, &tuple_labels)?;

    let (labels, names) = canonical_labels(p, n, false);
    Ok(BlockSpace {
        space: reorder(&lambda, &names),
        labels,
        base: p.clone(),
        arity: n,
        constants: Vec::new(),
        scale: Q::one(),
        seed: None,
    })
}

/// Tag constants `c_i = 5 + (i+1)/(n+3)` for `i = 0, …, n+1`; strictly
/// increasing inside `(5, 6)`.
pub fn tag_constants(n: usize) -> Vec<Q> {
    let denom = qi(n as i64 + 3);
    (0..=n + 1).map(|i| qi(5) + qi(i as i64 + 1) / &denom).collect()
}

fn check_subgroup(p: &FiniteMetricSpace, g: &PermutationGroup) -> Result<(), RealizationError> {
    if g.degree() != p.len() {
        return Err(RealizationError::NotSubgroup(format!(
            "group acts on {} points, space has {}",
            g.degree(),
            p.len()
        )));
    }
    if let Some(bad) = g.elements().iter().find(|u| !p.is_isometry(u.images())) {
        return Err(RealizationError::NotSubgroup(format!("{bad:?} is not an isometry")));
    }
    Ok(())
}

/// The gadget with a tag point marking the `g`-orbit of the seed tuple `z`.
///
/// The tag's distances to the copies and to the orbit form a Katětov map on
/// that subspace; the resulting one-point extension is amalgamated with the
/// copies-and-tuples gadget over the copies and the orbit.
pub fn tagged_gadget(
    p: &FiniteMetricSpace,
    g: &PermutationGroup,
    z: &[usize],
) -> Result<BlockSpace, RealizationError> {
    check_scaled(p)?;
    let n = z.len();
    if n < 2 {
        return Err(RealizationError::BadArity(n));
    }
    if let Some(&x) = z.iter().find(|&&x| x >= p.len()) {
        return Err(RealizationError::BadTuple(x));
    }
    check_subgroup(p, g)?;
    let lambda = copy_gadget(p, n)?;
    let k = p.len();
    let constants = tag_constants(n);
    let orbit = g.orbit(z)?;

    let copies = k * (n + 1);
    let mut anchor: Vec<usize> = (0..copies).collect();
    anchor.extend(orbit.iter().map(|t| copies + tuple_index(t, k)));
    let anchor_space = lambda.space.restrict(&anchor);
    let values: Vec<Q> = anchor
        .iter()
        .map(|&i| match &lambda.labels[i] {
            PointLabel::Base { copy, .. } => constants[*copy].clone(),
            _ => constants[n + 1].clone(),
        })
        .collect();
    let tagged = extend_by_katetov(&KatetovMap::new(anchor_space.clone(), values)?, "tag")?;
    let mu = amalgamate(&[tagged, lambda.space.clone()], anchor_space.points())?;

    let (labels, names) = canonical_labels(p, n, true);
    Ok(BlockSpace {
        space: reorder(&mu, &names),
        labels,
        base: p.clone(),
        arity: n,
        constants,
        scale: Q::one(),
        seed: Some(z.to_vec()),
    })
}

/// Choice of seed tuple for [`realize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// All points of the space, in order.
    Full,
    /// A greedy base of the full isometry group.
    Base,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizeOptions {
    pub mode: Mode,
    pub point_cap: usize,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { mode: Mode::Base, point_cap: DEFAULT_POINT_CAP }
    }
}

/// The group homomorphism `u ↦ û` from a base-space group into the
/// isometries of a gadget space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub source: PermutationGroup,
    pub image: PermutationGroup,
    /// `map[i]` is the index in `image` of the hat of `source.elements()[i]`.
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(block: &BlockSpace, source: &PermutationGroup) -> Result<Embedding, RealizationError> {
        let hats: Vec<Perm> = source.elements().iter().map(|u| block.hat(u)).collect();
        let image = PermutationGroup::from_elements(block.space.len(), hats.clone())?;
        let map = hats.iter().map(|h| image.index_of(h).expect("member")).collect();
        Ok(Embedding { source: source.clone(), image, map })
    }
}

/// Number of points of the tagged gadget with `k` base points and arity `n`.
pub fn gadget_size(k: usize, n: usize) -> Option<usize> {
    k.checked_pow(n as u32)?.checked_add(k.checked_mul(n + 1)?)?.checked_add(1)
}

/// Builds a finite metric space whose full isometry group is exactly
/// `{û : u ∈ g}`.
///
/// The space is scaled below 1 (factor twice its diameter), the tagged
/// gadget is built for a seed tuple that is a base of the full isometry
/// group, and distances are multiplied back by the scale factor. A
/// one-point space is returned unchanged.
pub fn realize(
    space: &FiniteMetricSpace,
    g: &PermutationGroup,
    options: RealizeOptions,
) -> Result<(BlockSpace, Embedding), RealizationError> {
    check_subgroup(space, g)?;
    if space.len() <= 1 {
        let block = BlockSpace {
            space: space.clone(),
            labels: (0..space.len()).map(|x| PointLabel::Base { x, copy: 0 }).collect(),
            base: space.clone(),
            arity: 0,
            constants: Vec::new(),
            scale: Q::one(),
            seed: None,
        };
        let embedding = Embedding::new(&block, g)?;
        return Ok((block, embedding));
    }
    let (p, r) = scale(space, None)?;
    let z: Vec<usize> = match options.mode {
        Mode::Full => (0..space.len()).collect(),
        Mode::Base => isometries(&p).minimal_base(),
    };
    let points = gadget_size(space.len(), z.len()).unwrap_or(usize::MAX);
    if points > options.point_cap {
        return Err(RealizationError::SizeBound { points, cap: options.point_cap });
    }
    let mut block = tagged_gadget(&p, g, &z)?;
    block.space = block.space.dilate(&r)?;
    block.scale = r;
    block.base = space.clone();
    let embedding = Embedding::new(&block, g)?;
    Ok((block, embedding))
}

/// Realizes a permutation group over the discrete metric on its points,
/// whose isometry group is the full symmetric group.
pub fn permgroup_to_space(
    g: &PermutationGroup,
    options: RealizeOptions,
) -> Result<(BlockSpace, Embedding), RealizationError> {
    let labels = (0..g.degree()).map(|i| i.to_string()).collect();
    let space = FiniteMetricSpace::discrete(labels)?;
    realize(&space, g, options)
}

/// What [`verify_realization`] found wrong, if anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrepancy {
    /// An isometry of the realized space outside the embedded image.
    ExtraIsometry(Perm),
    /// An image element that does not preserve the realized metric.
    NotAnIsometry(Perm),
    /// `map` is not a bijection onto the image.
    NotBijective,
    /// `map(a ∘ b) ≠ map(a) ∘ map(b)` for the given source indices.
    NotHomomorphism { a: usize, b: usize },
    /// `map` sends the source element to something other than its hat.
    WrongAction { element: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub discrepancies: Vec<Discrepancy>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Recomputes the isometry group of the realized space from scratch and
/// compares it with the embedded image; checks the embedding is an
/// isomorphism onto that image acting by hats.
pub fn verify_realization(block: &BlockSpace, embedding: &Embedding) -> VerificationReport {
    verify_against(block, embedding, &isometries(&block.space))
}

/// As [`verify_realization`], with the isometry group of `block.space`
/// already computed.
pub fn verify_against(block: &BlockSpace, embedding: &Embedding, actual: &PermutationGroup) -> VerificationReport {
    let mut report = VerificationReport::default();
    for e in actual.elements() {
        if !embedding.image.contains(e) {
            report.discrepancies.push(Discrepancy::ExtraIsometry(e.clone()));
            break;
        }
    }
    for e in embedding.image.elements() {
        if !actual.contains(e) {
            report.discrepancies.push(Discrepancy::NotAnIsometry(e.clone()));
            break;
        }
    }
    let source = &embedding.source;
    let mut hit = vec![false; embedding.image.order()];
    let bijective = embedding.map.len() == source.order()
        && source.order() == embedding.image.order()
        && embedding.map.iter().all(|&m| m < hit.len() && !core::mem::replace(&mut hit[m], true));
    if !bijective {
        report.discrepancies.push(Discrepancy::NotBijective);
        return report;
    }
    let image = embedding.image.elements();
    'hom: for a in 0..source.order() {
        for b in 0..source.order() {
            let ab = source.elements()[a].compose(&source.elements()[b]);
            let ab_index = source.index_of(&ab).expect("closed");
            if image[embedding.map[ab_index]] != image[embedding.map[a]].compose(&image[embedding.map[b]]) {
                report.discrepancies.push(Discrepancy::NotHomomorphism { a, b });
                break 'hom;
            }
        }
    }
    for (i, u) in source.elements().iter().enumerate() {
        if block.labels.len() != block.space.len() || image[embedding.map[i]] != block.hat(u) {
            report.discrepancies.push(Discrepancy::WrongAction { element: i });
            break;
        }
    }
    report
}

/// A property of a gadget that failed to hold exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetFailure {
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GadgetReport {
    pub checks_run: Vec<&'static str>,
    pub failures: Vec<GadgetFailure>,
}

impl GadgetReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, check: &'static str, result: Result<(), String>) {
        self.checks_run.push(check);
        if let Err(detail) = result {
            self.failures.push(GadgetFailure { check, detail });
        }
    }
}

/// Exact certification of the structural properties of a gadget, in
/// gadget units (before the final rescaling):
///
/// * `respects`: each copy carries `p`, the tuples carry the max metric,
///   distinct blocks are at least 1 apart;
/// * `lambda<=5` on copies and tuples, `mu<=11` overall;
/// * `diagonal-link`: `μ((x,0), t) = 1` iff `t = (x,…,x)`;
/// * `coordinate-link`: `μ((x,j), t) = 1` iff `t_j = x`, for `j ≥ 1`;
/// * `tag-unique`: the tag is the only point with neighbours at both `c_0`
///   and `c_1`;
/// * `tag-copies`: `μ((x,j), tag) = c_j`;
/// * `tag-orbit`: `μ(y, tag) ≥ c_{n+1}` on tuples, with equality iff `y`
///   lies in the orbit of the seed under `group`.
pub fn certify_gadget(block: &BlockSpace, group: Option<&PermutationGroup>) -> GadgetReport {
    let mut report = GadgetReport::default();
    let n = block.arity;
    if n < 2 {
        return report;
    }
    let mu = block.gadget_metric();
    let p = match block.base.dilate(&(Q::one() / &block.scale)) {
        Ok(p) => p,
        Err(e) => {
            report.record("respects", Err(e.to_string()));
            return report;
        }
    };
    let k = p.len();
    let copies = k * (n + 1);
    let tuple_count = k.pow(n as u32);
    let tag = block.tag_index();
    let one = Q::one();

    let mut blocks: Vec<Block> = (0..=n)
        .map(|j| Block { points: (j * k..(j + 1) * k).collect(), expected: p.clone() })
        .collect();
    let respects = power(&p, n).map_err(|e| e.to_string()).and_then(|pw| {
        blocks.push(Block { points: (copies..copies + tuple_count).collect(), expected: pw });
        if let Some(t) = tag {
            let single = FiniteMetricSpace::discrete(vec!["tag".to_string()]).expect("one point");
            blocks.push(Block { points: vec![t], expected: single });
        }
        respects_check(&mu, &blocks).map_err(|v| format!("{v:?}"))
    });
    report.record("respects", respects);

    let body = copies + tuple_count;
    let max_body = (0..body).flat_map(|i| (0..body).map(move |j| (i, j))).map(|(i, j)| mu.d(i, j)).max();
    report.record(
        "lambda<=5",
        match max_body {
            Some(m) if *m > qi(5) => Err(format!("max {m}")),
            _ => Ok(()),
        },
    );
    if tag.is_some() {
        let m = mu.diameter();
        report.record("mu<=11", if m > qi(11) { Err(format!("max {m}")) } else { Ok(()) });
    }

    let tuple_of = |t: usize| tuple_coords(t, k, n);
    let mut diag = Ok(());
    let mut coord = Ok(());
    for t in 0..tuple_count {
        let xs = tuple_of(t);
        for x in 0..k {
            let at_one = mu.d(x, copies + t) == &one;
            if at_one != xs.iter().all(|&c| c == x) && diag.is_ok() {
                diag = Err(format!("x={x} tuple={xs:?}"));
            }
            for j in 1..=n {
                let at_one = mu.d(j * k + x, copies + t) == &one;
                if at_one != (xs[j - 1] == x) && coord.is_ok() {
                    coord = Err(format!("x={x} j={j} tuple={xs:?}"));
                }
            }
        }
    }
    report.record("diagonal-link", diag);
    report.record("coordinate-link", coord);

    let (Some(tag), true) = (tag, block.constants.len() == n + 2) else {
        return report;
    };
    let c = &block.constants;
    let increasing = c.windows(2).all(|w| w[0] < w[1]) && c[0] > qi(5) && c[n + 1] < qi(6);
    report.record("constants", if increasing { Ok(()) } else { Err("not 5 < c0 < … < 6".to_string()) });

    let marked: Vec<usize> = match (mu.code_of(&c[0]), mu.code_of(&c[1])) {
        (Some(c0), Some(c1)) => (0..mu.len())
            .filter(|&q| {
                let row = mu.row_codes(q);
                row.contains(&c0) && row.contains(&c1)
            })
            .collect(),
        _ => Vec::new(),
    };
    report.record(
        "tag-unique",
        if marked == [tag] { Ok(()) } else { Err(format!("points with c0 and c1 neighbours: {marked:?}")) },
    );

    let copies_ok = (0..copies).find(|&i| mu.d(i, tag) != &c[i / k]);
    report.record(
        "tag-copies",
        match copies_ok {
            Some(i) => Err(format!("point {i}")),
            None => Ok(()),
        },
    );

    let orbit: Option<BTreeMap<Vec<usize>, ()>> = match (group, &block.seed) {
        (Some(g), Some(z)) => g.orbit(z).ok().map(|o| o.into_iter().map(|t| (t, ())).collect()),
        _ => None,
    };
    if let Some(orbit) = orbit {
        let mut result = Ok(());
        for t in 0..tuple_count {
            let xs = tuple_of(t);
            let d = mu.d(copies + t, tag);
            let in_orbit = orbit.contains_key(&xs);
            if d < &c[n + 1] || (d == &c[n + 1]) != in_orbit {
                result = Err(format!("tuple {xs:?} at {d}, in orbit: {in_orbit}"));
                break;
            }
        }
        report.record("tag-orbit", result);
    }
    report
}
