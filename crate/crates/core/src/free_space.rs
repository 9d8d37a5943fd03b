//! The Arens-Eells (Lipschitz-free) space of a finite metric space.
//!
//! Molecules are zero-sum rational functions on the points. Their norm is
//! the optimal cost of shipping the positive part onto the negative part,
//! computed exactly by successive shortest paths and certified by a
//! 1-Lipschitz potential with the same value (Kantorovich duality).
//!
//! The unit ball of a strict-triangle space is the convex hull of the
//! normalized elementary molecules `±(χ_p − χ_q)/d(p, q)`; its linear
//! symmetries are enumerated by backtracking over images of a basis.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::group::{GroupError, Perm, PermutationGroup};
use crate::lp::feasible_point;
use crate::metric::FiniteMetricSpace;
use crate::rational::{q, qi, Q};
use crate::search::isometries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeSpaceError {
    #[error("molecule coefficients sum to {0}, not zero")]
    NotBalanced(Q),
    #[error("expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("molecules live over different spaces")]
    BaseMismatch,
    #[error("permutation does not preserve the metric")]
    NotIsometry,
    #[error("triangle inequality is not strict at {0:?}")]
    NotStrict([usize; 3]),
    #[error("elementary molecule {0} is a convex combination of the others")]
    NotAVertex(usize),
    #[error("diameter {0} is not below 1/2")]
    DiameterTooLarge(Q),
    #[error("label {0:?} is already in use")]
    LabelInUse(String),
    #[error("anchor point {0:?} not found")]
    MissingAnchor(&'static str),
}

/// A zero-sum rational function on the points of `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule<'a> {
    base: &'a FiniteMetricSpace,
    coeffs: Vec<Q>,
}

impl<'a> Molecule<'a> {
    pub fn new(base: &'a FiniteMetricSpace, coeffs: Vec<Q>) -> Result<Self, FreeSpaceError> {
        if coeffs.len() != base.len() {
            return Err(FreeSpaceError::LengthMismatch { expected: base.len(), got: coeffs.len() });
        }
        let sum: Q = coeffs.iter().sum();
        if !sum.is_zero() {
            return Err(FreeSpaceError::NotBalanced(sum));
        }
        Ok(Molecule { base, coeffs })
    }

    pub fn zero(base: &'a FiniteMetricSpace) -> Self {
        Molecule { base, coeffs: vec![Q::zero(); base.len()] }
    }

    /// `χ_p − χ_q`.
    pub fn elementary(base: &'a FiniteMetricSpace, p: usize, q: usize) -> Self {
        let mut coeffs = vec![Q::zero(); base.len()];
        coeffs[p] += Q::one();
        coeffs[q] -= Q::one();
        Molecule { base, coeffs }
    }

    pub fn base(&self) -> &'a FiniteMetricSpace {
        self.base
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &Q) -> Self {
        Molecule { base: self.base, coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn try_add(&self, other: &Molecule<'_>) -> Result<Molecule<'a>, FreeSpaceError> {
        if self.base != other.base {
            return Err(FreeSpaceError::BaseMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Molecule { base: self.base, coeffs })
    }

    pub fn neg(&self) -> Self {
        self.scaled(&qi(-1))
    }
}

/// An optimal transport plan together with a dual potential of equal value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportCertificate {
    /// `(from, to, amount)` with positive amounts, sorted by `(from, to)`.
    pub plan: Vec<(usize, usize, Q)>,
    pub potential: Vec<Q>,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateViolation {
    NegativeFlow(usize, usize),
    Divergence(usize),
    NotLipschitz(usize, usize),
    PrimalValue,
    DualValue,
}

impl TransportCertificate {
    pub fn primal_cost(&self, space: &FiniteMetricSpace) -> Q {
        self.plan.iter().map(|(p, q, f)| f * space.d(*p, *q)).sum()
    }

    pub fn dual_value(&self, m: &Molecule<'_>) -> Q {
        m.coeffs.iter().zip(&self.potential).map(|(c, phi)| c * phi).sum()
    }

    /// Checks flow conservation, the 1-Lipschitz property of the potential
    /// and exact equality of primal cost, dual value and `value`.
    pub fn check(&self, m: &Molecule<'_>) -> Result<(), CertificateViolation> {
        let space = m.base;
        let n = space.len();
        let mut net = vec![Q::zero(); n];
        for (p, q, f) in &self.plan {
            if f.is_negative() {
                return Err(CertificateViolation::NegativeFlow(*p, *q));
            }
            net[*p] += f;
            net[*q] -= f;
        }
        if let Some(p) = (0..n).find(|&p| net[p] != m.coeffs[p]) {
            return Err(CertificateViolation::Divergence(p));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if (&self.potential[p] - &self.potential[q]).abs() > *space.d(p, q) {
                    return Err(CertificateViolation::NotLipschitz(p, q));
                }
            }
        }
        if self.primal_cost(space) != self.value {
            return Err(CertificateViolation::PrimalValue);
        }
        if self.dual_value(m) != self.value {
            return Err(CertificateViolation::DualValue);
        }
        Ok(())
    }
}

/// Shortest-path labels from a virtual source joined to every point at
/// cost 0, over forward edges `p → q` (cost `d(p,q)`) and reverse edges
/// `q → p` (cost `−d(p,q)`) wherever `flow[p][q] > 0`.
fn residual_labels(space: &FiniteMetricSpace, flow: &[Vec<Q>]) -> Vec<Q> {
    let n = space.len();
    let mut label = vec![Q::zero(); n];
    for _ in 0..=n {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                let via = &label[p] + space.d(p, q);
                if via < label[q] {
                    label[q] = via;
                    changed = true;
                }
                if flow[p][q].is_positive() {
                    let back = &label[q] - space.d(p, q);
                    if back < label[p] {
                        label[p] = back;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
    panic!("negative cycle in an optimal residual graph");
}

/// `‖m‖_AE` with an exact optimality certificate.
///
/// Successive shortest paths move mass from points with remaining excess to
/// points with remaining deficit along cheapest residual routes. The dual
/// potential comes from shortest-path labels of the final residual graph,
/// lifted to the largest 1-Lipschitz function agreeing with it on the
/// deficit points (so `χ_p − χ_q` gets `d(·, q)`).
pub fn ae_norm(m: &Molecule<'_>) -> TransportCertificate {
    let space = m.base;
    let n = space.len();
    let mut excess: Vec<Q> = m.coeffs.iter().map(|c| if c.is_positive() { c.clone() } else { Q::zero() }).collect();
    let mut deficit: Vec<Q> = m.coeffs.iter().map(|c| if c.is_negative() { -c } else { Q::zero() }).collect();
    let mut flow = vec![vec![Q::zero(); n]; n];

    let source = n;
    loop {
        if excess.iter().all(Zero::is_zero) {
            break;
        }
        let mut dist: Vec<Option<Q>> = vec![None; n + 1];
        let mut pred: Vec<usize> = vec![usize::MAX; n + 1];
        let mut via_reverse = vec![false; n + 1];
        dist[source] = Some(Q::zero());
        for p in 0..n {
            if excess[p].is_positive() {
                dist[p] = Some(Q::zero());
                pred[p] = source;
            }
        }
        for _ in 0..n + 1 {
            let mut changed = false;
            for p in 0..n {
                let Some(dp) = dist[p].clone() else { continue };
                for q in 0..n {
                    if p == q {
                        continue;
                    }
                    let mut relax = |cost: Q, reverse: bool| {
                        let cand = &dp + cost;
                        if dist[q].as_ref().map_or(true, |dq| cand < *dq) {
                            dist[q] = Some(cand);
                            pred[q] = p;
                            via_reverse[q] = reverse;
                            changed = true;
                        }
                    };
                    relax(space.d(p, q).clone(), false);
                    if flow[q][p].is_positive() {
                        relax(-space.d(q, p).clone(), true);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let end = (0..n)
            .filter(|&q| deficit[q].is_positive())
            .filter_map(|q| dist[q].clone().map(|d| (d, q)))
            .min()
            .map(|(_, q)| q)
            .expect("balanced molecule leaves a reachable deficit");

        // Walk back to find the route and its bottleneck.
        let mut route = vec![end];
        while pred[*route.last().expect("nonempty")] != source {
            let q = *route.last().expect("nonempty");
            route.push(pred[q]);
        }
        route.reverse();
        let start = route[0];
        let mut amount = excess[start].clone().min(deficit[end].clone());
        for w in route.windows(2) {
            let (p, q) = (w[0], w[1]);
            if via_reverse[q] {
                amount = amount.min(flow[q][p].clone());
            }
        }
        for w in route.windows(2) {
            let (p, q) = (w[0], w[1]);
            if via_reverse[q] {
                flow[q][p] -= &amount;
            } else {
                flow[p][q] += &amount;
            }
        }
        excess[start] -= &amount;
        deficit[end] -= &amount;
    }

    // Cancel opposite flows on the same pair (cost only decreases).
    for p in 0..n {
        for q in (p + 1)..n {
            let common = flow[p][q].clone().min(flow[q][p].clone());
            if common.is_positive() {
                flow[p][q] -= &common;
                flow[q][p] -= &common;
            }
        }
    }

    let labels = residual_labels(space, &flow);
    let raw: Vec<Q> = labels.iter().map(|l| -l).collect();
    let sinks: Vec<usize> = (0..n).filter(|&q| m.coeffs[q].is_negative()).collect();
    let potential: Vec<Q> = if sinks.is_empty() {
        vec![Q::zero(); n]
    } else {
        (0..n)
            .map(|x| sinks.iter().map(|&q| &raw[q] + space.d(x, q)).min().expect("nonempty"))
            .collect()
    };
    let mut plan = Vec::new();
    for (p, row) in flow.iter().enumerate() {
        for (q, f) in row.iter().enumerate() {
            if f.is_positive() {
                plan.push((p, q, f.clone()));
            }
        }
    }
    let value = plan.iter().map(|(p, q, f)| f * space.d(*p, *q)).sum();
    TransportCertificate { plan, potential, value }
}

/// `AE(u)`: the molecule pushed forward along the isometry `u`.
pub fn ae_map<'a>(u: &Perm, m: &Molecule<'a>) -> Result<Molecule<'a>, FreeSpaceError> {
    if !m.base.is_isometry(u.images()) {
        return Err(FreeSpaceError::NotIsometry);
    }
    let mut coeffs = vec![Q::zero(); m.coeffs.len()];
    for (p, c) in m.coeffs.iter().enumerate() {
        coeffs[u.apply(p)] = c.clone();
    }
    Ok(Molecule { base: m.base, coeffs })
}

/// Ordered pairs behind [`ball_vertices`]: for `p < q`, first
/// `(χ_p − χ_q)/d`, then its negative.
pub fn vertex_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..k {
        for q in (p + 1)..k {
            out.push((p, q));
            out.push((q, p));
        }
    }
    out
}

fn normalized_elementary<'a>(space: &'a FiniteMetricSpace, p: usize, q: usize) -> Molecule<'a> {
    Molecule::elementary(space, p, q).scaled(&(Q::one() / space.d(p, q)))
}

/// The normalized elementary molecules, each certified to be a vertex of
/// the unit ball by infeasibility of writing it as a convex combination of
/// the others.
pub fn ball_vertices(space: &FiniteMetricSpace) -> Result<Vec<Molecule<'_>>, FreeSpaceError> {
    space.check_strict_triangle().map_err(FreeSpaceError::NotStrict)?;
    let vertices: Vec<Molecule<'_>> =
        vertex_pairs(space.len()).into_iter().map(|(p, q)| normalized_elementary(space, p, q)).collect();
    for (v, target) in vertices.iter().enumerate() {
        let others: Vec<&Molecule<'_>> =
            vertices.iter().enumerate().filter(|&(w, _)| w != v).map(|(_, m)| m).collect();
        // Rows: one per coordinate, plus Σλ = 1.
        let mut a: Vec<Vec<Q>> = (0..space.len())
            .map(|x| others.iter().map(|m| m.coeffs[x].clone()).collect())
            .collect();
        a.push(vec![Q::one(); others.len()]);
        let mut b: Vec<Q> = target.coeffs.clone();
        b.push(Q::one());
        if feasible_point(&a, &b).is_some() {
            return Err(FreeSpaceError::NotAVertex(v));
        }
    }
    Ok(vertices)
}

/// A linear self-map of the molecule space permuting the ball vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BallSymmetry {
    /// `vertex_perm[v]` is the index of the image of vertex `v`.
    pub vertex_perm: Vec<usize>,
    /// Matrix in the basis `(χ_0 − χ_i)/d(0, i)`, `i = 1, …, k−1`; column
    /// `c` holds the coordinates of the image of basis vector `c`.
    pub matrix: Vec<Vec<Q>>,
}

/// Coordinates of a molecule in the basis `(χ_0 − χ_i)/d(0, i)`.
fn basis_coords(space: &FiniteMetricSpace, coeffs: &[Q]) -> Vec<Q> {
    (1..space.len()).map(|i| -(&coeffs[i] * space.d(0, i))).collect()
}

/// All linear maps of the molecule space that permute the vertices of the
/// unit ball, sorted by vertex permutation.
///
/// The search fixes images of the basis vectors one at a time; after the
/// `t`-th choice every vertex supported on the first `t` basis directions
/// has a determined image, which must again be a vertex and distinct from
/// the images already used.
pub fn linear_ball_symmetries(space: &FiniteMetricSpace) -> Result<Vec<BallSymmetry>, FreeSpaceError> {
    let vertices = ball_vertices(space)?;
    let k = space.len();
    if k < 2 {
        return Ok(vec![BallSymmetry { vertex_perm: Vec::new(), matrix: Vec::new() }]);
    }
    let dim = k - 1;
    let coords: Vec<Vec<Q>> = vertices.iter().map(|m| basis_coords(space, &m.coeffs)).collect();
    let lookup: BTreeMap<Vec<Q>, usize> = coords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    // Basis vector i (0-based) is vertex (χ_0 − χ_{i+1})/d: pair (0, i+1).
    let pairs = vertex_pairs(k);
    let basis: Vec<usize> = (1..k).map(|i| pairs.iter().position(|&pq| pq == (0, i)).expect("pair")).collect();
    let mut checkable: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for (v, c) in coords.iter().enumerate() {
        let top = c.iter().rposition(|x| !x.is_zero()).expect("nonzero vertex");
        checkable[top].push(v);
    }
    let mut state = BallSearch {
        coords: &coords,
        lookup: &lookup,
        checkable: &checkable,
        basis: &basis,
        images: Vec::with_capacity(dim),
        perm: vec![usize::MAX; vertices.len()],
        used: vec![false; vertices.len()],
        found: Vec::new(),
    };
    state.extend(0);
    let mut found = state.found;
    found.sort();
    Ok(found)
}

struct BallSearch<'s> {
    coords: &'s [Vec<Q>],
    lookup: &'s BTreeMap<Vec<Q>, usize>,
    checkable: &'s [Vec<usize>],
    basis: &'s [usize],
    images: Vec<usize>,
    perm: Vec<usize>,
    used: Vec<bool>,
    found: Vec<BallSymmetry>,
}

impl BallSearch<'_> {
    fn image_of(&self, v: usize) -> Option<usize> {
        let dim = self.basis.len();
        let mut out = vec![Q::zero(); dim];
        for (c, x) in self.coords[v].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(&self.coords[self.images[c]]) {
                *o += x * y;
            }
        }
        self.lookup.get(&out).copied()
    }

    fn extend(&mut self, level: usize) {
        let dim = self.basis.len();
        if level == dim {
            let matrix = (0..dim)
                .map(|r| (0..dim).map(|c| self.coords[self.images[c]][r].clone()).collect())
                .collect();
            self.found.push(BallSymmetry { vertex_perm: self.perm.clone(), matrix });
            return;
        }
        for candidate in 0..self.coords.len() {
            if self.used[candidate] {
                continue;
            }
            self.images.push(candidate);
            let mut assigned = Vec::new();
            let mut ok = true;
            for &v in &self.checkable[level] {
                match self.image_of(v) {
                    Some(w) if !self.used[w] => {
                        self.used[w] = true;
                        self.perm[v] = w;
                        assigned.push(v);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.extend(level + 1);
            }
            for v in assigned {
                self.used[self.perm[v]] = false;
                self.perm[v] = usize::MAX;
            }
            self.images.pop();
        }
    }
}

/// Vertex permutation induced by `±AE(u)`.
pub fn signed_ae_vertex_perm(space: &FiniteMetricSpace, u: &Perm, negate: bool) -> Vec<usize> {
    let pairs = vertex_pairs(space.len());
    let index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &pq)| (pq, i)).collect();
    pairs
        .iter()
        .map(|&(p, q)| {
            let (a, b) = (u.apply(p), u.apply(q));
            index[&if negate { (b, a) } else { (a, b) }]
        })
        .collect()
}

/// `{±AE(u) : u ∈ Iso(space)}` as sorted vertex permutations.
pub fn signed_isometry_actions(space: &FiniteMetricSpace) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = isometries(space)
        .elements()
        .iter()
        .flat_map(|u| [signed_ae_vertex_perm(space, u, false), signed_ae_vertex_perm(space, u, true)])
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The ball symmetries as a permutation group on vertex indices.
pub fn symmetry_group(symmetries: &[BallSymmetry]) -> Result<PermutationGroup, GroupError> {
    let degree = symmetries.first().map_or(0, |s| s.vertex_perm.len());
    let perms = symmetries.iter().map(|s| Perm::new(s.vertex_perm.clone())).collect::<Result<Vec<_>, _>>()?;
    PermutationGroup::from_elements(degree, perms)
}

pub const CHAIN_LABELS: [&str; 4] = ["0", "1/4", "3/4", "1"];

/// Appends the chain `0, 1/4, 3/4, 1` (points labelled by their value `t`)
/// with `|s − t|` along the chain and `1 + t` to every point of `y_space`.
pub fn attach_anchor_chain(y_space: &FiniteMetricSpace) -> Result<FiniteMetricSpace, FreeSpaceError> {
    let diameter = y_space.diameter();
    if diameter >= q(1, 2) {
        return Err(FreeSpaceError::DiameterTooLarge(diameter));
    }
    if let Some(clash) = CHAIN_LABELS.iter().find(|l| y_space.index_of(l).is_some()) {
        return Err(FreeSpaceError::LabelInUse(clash.to_string()));
    }
    let chain = [q(0, 1), q(1, 4), q(3, 4), q(1, 1)];
    let k = y_space.len();
    let mut labels = y_space.points().to_vec();
    labels.extend(CHAIN_LABELS.iter().map(|s| s.to_string()));
    let space = FiniteMetricSpace::from_fn(labels, |i, j| match (i < k, j < k) {
        (true, true) => y_space.d(i, j).clone(),
        (false, false) => (&chain[i - k] - &chain[j - k]).abs(),
        (true, false) => Q::one() + &chain[j - k],
        (false, true) => Q::one() + &chain[i - k],
    })
    .expect("anchored chain metric");
    Ok(space)
}

/// Ball symmetries fixing `e = (χ_1 − χ_0)/d(1, 0)`, where `0` and `1` are
/// the chain endpoints.
pub fn fixed_vector_subgroup(space: &FiniteMetricSpace) -> Result<Vec<BallSymmetry>, FreeSpaceError> {
    let one = space.index_of("1").ok_or(FreeSpaceError::MissingAnchor("1"))?;
    let zero = space.index_of("0").ok_or(FreeSpaceError::MissingAnchor("0"))?;
    let e = vertex_pairs(space.len())
        .iter()
        .position(|&pq| pq == (one, zero))
        .expect("both anchors present");
    Ok(linear_ball_symmetries(space)?.into_iter().filter(|s| s.vertex_perm[e] == e).collect())
}
