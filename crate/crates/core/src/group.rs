//! Explicit permutation groups: closure, membership, orbits, bases and
//! abstract isomorphism testing.
//!
//! Groups are stored as the full sorted element list. That is the right
//! trade-off at desk scale (up to about a million elements) and makes every
//! structural claim checkable by enumeration.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Default bound on the order of any group materialized explicitly.
pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("not a permutation of 0..{degree}: {images:?}")]
    NotAPermutation { degree: usize, images: Vec<usize> },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group order exceeds the cap of {0} elements")]
    OrderBound(usize),
    #[error("element set does not contain the identity")]
    MissingIdentity,
    #[error("element set is not closed under composition")]
    NotClosed,
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
}

/// A bijection of `0..degree`, stored as its image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Perm, GroupError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            if x >= degree || seen[x] {
                return Err(GroupError::NotAPermutation { degree, images });
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Permutation of `0..degree` given by disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Perm, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if x >= degree {
                    return Err(GroupError::PointOutOfRange(x));
                }
                images[x] = next;
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn into_images(self) -> Vec<usize> {
        self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.0.len()];
        let mut order = 1usize;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    pub fn act_on_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&x| self.0[x]).collect()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// A finite permutation group held as its sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Perm>,
    generators: Vec<Perm>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> PermutationGroup {
        PermutationGroup {
            degree,
            elements: vec![Perm::identity(degree)],
            generators: Vec::new(),
        }
    }

    /// Smallest group containing `gens`, materialized by breadth-first
    /// closure. Fails once more than `cap` elements have been found.
    pub fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<PermutationGroup, GroupError> {
        for g in gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch(degree, g.degree()));
            }
        }
        let elements = close(degree, gens, cap)?;
        Ok(Self::with_canonical_generators(degree, elements))
    }

    /// Group from an explicit element list; verifies identity, bijectivity
    /// and closure.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<PermutationGroup, GroupError> {
        let mut elements = elements;
        for e in &elements {
            if e.degree() != degree {
                return Err(GroupError::DegreeMismatch(degree, e.degree()));
            }
        }
        elements.sort();
        elements.dedup();
        if elements.binary_search(&Perm::identity(degree)).is_err() {
            return Err(GroupError::MissingIdentity);
        }
        let group = Self::with_canonical_generators(degree, elements);
        let regenerated = close(degree, &group.generators, group.elements.len())
            .map_err(|_| GroupError::NotClosed)?;
        if regenerated != group.elements {
            return Err(GroupError::NotClosed);
        }
        Ok(group)
    }

    /// `elements` must already be a sorted, closed subgroup.
    pub(crate) fn from_sorted_unchecked(degree: usize, elements: Vec<Perm>) -> PermutationGroup {
        Self::with_canonical_generators(degree, elements)
    }

    /// Picks generators first-fit, scanning elements by decreasing order
    /// (ties lexicographic) and keeping each one not yet generated.
    fn with_canonical_generators(degree: usize, elements: Vec<Perm>) -> PermutationGroup {
        let mut candidates: Vec<(usize, usize)> =
            elements.iter().enumerate().map(|(i, e)| (e.order(), i)).collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut generators: Vec<Perm> = Vec::new();
        let mut generated: BTreeSet<Perm> = BTreeSet::new();
        generated.insert(Perm::identity(degree));
        for (_, i) in candidates {
            if generated.len() == elements.len() {
                break;
            }
            if generated.contains(&elements[i]) {
                continue;
            }
            generators.push(elements[i].clone());
            generated = close(degree, &generators, usize::MAX)
                .expect("uncapped closure")
                .into_iter()
                .collect();
        }
        PermutationGroup { degree, elements, generators }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.elements.binary_search(p).ok()
    }

    /// Exhaustive check of the group axioms on the stored element set.
    pub fn check_invariants(&self) -> Result<(), GroupError> {
        if !self.elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(GroupError::NotClosed);
        }
        if !self.contains(&Perm::identity(self.degree)) {
            return Err(GroupError::MissingIdentity);
        }
        for a in &self.elements {
            Perm::new(a.0.clone())?;
            if !self.contains(&a.inverse()) {
                return Err(GroupError::NotClosed);
            }
            for b in &self.elements {
                if !self.contains(&a.compose(b)) {
                    return Err(GroupError::NotClosed);
                }
            }
        }
        Ok(())
    }

    /// `{(g(z₁), …, g(zₙ)) : g ∈ G}`, sorted.
    pub fn orbit(&self, tuple: &[usize]) -> Result<Vec<Vec<usize>>, GroupError> {
        if let Some(&x) = tuple.iter().find(|&&x| x >= self.degree) {
            return Err(GroupError::PointOutOfRange(x));
        }
        let set: BTreeSet<Vec<usize>> = self.elements.iter().map(|g| g.act_on_tuple(tuple)).collect();
        Ok(set.into_iter().collect())
    }

    /// Elements fixing every point of `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Vec<&Perm> {
        self.elements
            .iter()
            .filter(|g| points.iter().all(|&x| g.apply(x) == x))
            .collect()
    }

    /// Greedy base: repeatedly add the point whose stabilizer inside the
    /// current stabilizer is smallest (lowest index on ties), then pad with
    /// the lowest unused points up to length 2 when the degree allows it.
    pub fn minimal_base(&self) -> Vec<usize> {
        let mut base: Vec<usize> = Vec::new();
        let mut current: Vec<&Perm> = self.elements.iter().collect();
        while current.len() > 1 {
            let mut best: Option<(usize, usize)> = None;
            for x in 0..self.degree {
                if base.contains(&x) {
                    continue;
                }
                let size = current.iter().filter(|g| g.apply(x) == x).count();
                if best.map_or(true, |(s, _)| size < s) {
                    best = Some((size, x));
                }
            }
            let (_, x) = best.expect("nontrivial stabilizer moves some point");
            base.push(x);
            current.retain(|g| g.apply(x) == x);
        }
        let mut x = 0;
        while base.len() < 2 && x < self.degree {
            if !base.contains(&x) {
                base.push(x);
            }
            x += 1;
        }
        base
    }

    /// Index multiplication table: `table[a][b] = index(elements[a] ∘ elements[b])`.
    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index_of(&a.compose(b)).expect("closed group"))
                    .collect()
            })
            .collect()
    }

    /// Every subgroup, found by adjoining one element at a time starting
    /// from the trivial group. Sorted by (order, elements).
    pub fn all_subgroups(&self) -> Vec<PermutationGroup> {
        let mut found: BTreeSet<Vec<Perm>> = BTreeSet::new();
        let trivial = alloc::vec![Perm::identity(self.degree)];
        found.insert(trivial.clone());
        let mut queue = VecDeque::from([trivial]);
        while let Some(h) = queue.pop_front() {
            let hset: BTreeSet<&Perm> = h.iter().collect();
            let gens_h = PermutationGroup::from_sorted_unchecked(self.degree, h.clone()).generators;
            for g in &self.elements {
                if hset.contains(g) {
                    continue;
                }
                let mut gens = gens_h.clone();
                gens.push(g.clone());
                let bigger = close(self.degree, &gens, usize::MAX).expect("uncapped closure");
                if found.insert(bigger.clone()) {
                    queue.push_back(bigger);
                }
            }
        }
        let mut groups: Vec<PermutationGroup> = found
            .into_iter()
            .map(|e| PermutationGroup::from_sorted_unchecked(self.degree, e))
            .collect();
        groups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
        groups
    }
}

/// Breadth-first closure; returns the sorted element list.
fn close(degree: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>, GroupError> {
    let id = Perm::identity(degree);
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(GroupError::OrderBound(cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Whether every element of `h` lies in `g`.
pub fn is_subgroup(h: &PermutationGroup, g: &PermutationGroup) -> Result<bool, GroupError> {
    if h.degree != g.degree {
        return Err(GroupError::DegreeMismatch(h.degree, g.degree));
    }
    Ok(h.elements.iter().all(|e| g.contains(e)))
}

/// Abstract group isomorphism test.
///
/// Backtracks over images of `g1`'s generators among `g2` elements of
/// matching order, extends each choice along words in the generators, and
/// accepts only when the extension is a bijection that respects the full
/// multiplication tables. On success returns the witness: `witness[i]` is
/// the index in `g2` of the image of `g1.elements()[i]`.
pub fn abstract_isomorphic(
    g1: &PermutationGroup,
    g2: &PermutationGroup,
    cap: usize,
) -> Result<Option<Vec<usize>>, GroupError> {
    if g1.order() > cap || g2.order() > cap {
        return Err(GroupError::OrderBound(cap));
    }
    if g1.order() != g2.order() {
        return Ok(None);
    }
    if order_profile(g1) != order_profile(g2) {
        return Ok(None);
    }
    let t1 = g1.multiplication_table();
    let t2 = g2.multiplication_table();
    let e1 = g1.index_of(&Perm::identity(g1.degree)).expect("identity");
    let e2 = g2.index_of(&Perm::identity(g2.degree)).expect("identity");
    let gens: Vec<usize> = g1.generators.iter().map(|g| g1.index_of(g).expect("generator")).collect();
    let orders1: Vec<usize> = g1.elements.iter().map(Perm::order).collect();
    let orders2: Vec<usize> = g2.elements.iter().map(Perm::order).collect();

    let mut images = vec![0usize; gens.len()];
    Ok(search_generator_images(0, &gens, &mut images, &orders1, &orders2, &t1, &t2, e1, e2))
}

fn order_profile(g: &PermutationGroup) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for e in &g.elements {
        *m.entry(e.order()).or_insert(0) += 1;
    }
    m
}

#[allow(clippy::too_many_arguments)]
fn search_generator_images(
    level: usize,
    gens: &[usize],
    images: &mut Vec<usize>,
    orders1: &[usize],
    orders2: &[usize],
    t1: &[Vec<usize>],
    t2: &[Vec<usize>],
    e1: usize,
    e2: usize,
) -> Option<Vec<usize>> {
    if level == gens.len() {
        return extend_to_isomorphism(gens, images, t1, t2, e1, e2);
    }
    for candidate in 0..orders2.len() {
        if orders2[candidate] != orders1[gens[level]] {
            continue;
        }
        images[level] = candidate;
        if let Some(w) = search_generator_images(level + 1, gens, images, orders1, orders2, t1, t2, e1, e2) {
            return Some(w);
        }
    }
    None
}

fn extend_to_isomorphism(
    gens: &[usize],
    images: &[usize],
    t1: &[Vec<usize>],
    t2: &[Vec<usize>],
    e1: usize,
    e2: usize,
) -> Option<Vec<usize>> {
    let n = t1.len();
    let mut map = vec![usize::MAX; n];
    map[e1] = e2;
    let mut queue = VecDeque::from([e1]);
    while let Some(x) = queue.pop_front() {
        for (&s, &img) in gens.iter().zip(images) {
            let y = t1[s][x];
            let fy = t2[img][map[x]];
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    let mut hit = vec![false; n];
    for &m in &map {
        if m == usize::MAX || hit[m] {
            return None;
        }
        hit[m] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if map[t1[a][b]] != t2[map[a]][map[b]] {
                return None;
            }
        }
    }
    Some(map)
}
