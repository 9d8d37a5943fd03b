//! Isometry group enumeration.
//!
//! Distances are first replaced by integer codes (rank among the distinct
//! values). Points are then colored by iterated distance-profile
//! refinement: a point's new color is its old color together with the
//! sorted multiset of `(distance code, color)` pairs to all other points.
//! Colors are assigned by sorting signatures, so they are canonical and
//! every isometry preserves them. Finally a backtracking search maps points
//! one at a time, keeping for every unmapped point the set of candidates
//! consistent with all distances fixed so far.

use alloc::vec;
use alloc::vec::Vec;

use crate::group::{GroupError, Perm, PermutationGroup, DEFAULT_ORDER_CAP};
use crate::metric::FiniteMetricSpace;

/// Full isometry group of `space`.
pub fn isometries(space: &FiniteMetricSpace) -> PermutationGroup {
    try_isometries(space, usize::MAX).expect("uncapped search")
}

/// As [`isometries`], failing once more than `cap` isometries are found.
pub fn try_isometries(space: &FiniteMetricSpace, cap: usize) -> Result<PermutationGroup, GroupError> {
    let n = space.len();
    let codes = distance_codes(space);
    let colors = refine_colors(n, codes);
    let mut search = Search {
        n,
        codes,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        found: Vec::new(),
        cap,
    };
    let domains: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| colors[j] == colors[i]).collect())
        .collect();
    let unassigned: Vec<usize> = (0..n).collect();
    search.extend(&domains, &unassigned)?;
    let mut found = search.found;
    found.sort();
    Ok(PermutationGroup::from_sorted_unchecked(n, found))
}

/// Isometry group under the default order cap.
pub fn isometries_capped(space: &FiniteMetricSpace) -> Result<PermutationGroup, GroupError> {
    try_isometries(space, DEFAULT_ORDER_CAP)
}

/// Rank of each distance among the sorted distinct values, row-major.
pub fn distance_codes(space: &FiniteMetricSpace) -> &[u32] {
    space.codes()
}

/// Canonical stable coloring under distance-profile refinement.
pub fn refine_colors(n: usize, codes: &[u32]) -> Vec<usize> {
    let mut colors = vec![0usize; n];
    let mut classes = 1;
    loop {
        let signatures: Vec<(usize, Vec<(u32, usize)>)> = (0..n)
            .map(|i| {
                let mut profile: Vec<(u32, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (codes[i * n + j], colors[j]))
                    .collect();
                profile.sort_unstable();
                (colors[i], profile)
            })
            .collect();
        let mut sorted: Vec<&(usize, Vec<(u32, usize)>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = signatures
            .iter()
            .map(|s| sorted.binary_search(&s).expect("present"))
            .collect();
        let count = sorted.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

struct Search<'a> {
    n: usize,
    codes: &'a [u32],
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Perm>,
    cap: usize,
}

impl Search<'_> {
    fn extend(&mut self, domains: &[Vec<usize>], unassigned: &[usize]) -> Result<(), GroupError> {
        if unassigned.is_empty() {
            if self.found.len() >= self.cap {
                return Err(GroupError::OrderBound(self.cap));
            }
            self.found.push(Perm::new(self.image.clone()).expect("bijective"));
            return Ok(());
        }
        // Most constrained point first; lowest index on ties.
        let (slot, &point) = unassigned
            .iter()
            .enumerate()
            .min_by_key(|&(_, &p)| (domains[p].len(), p))
            .expect("nonempty");
        let rest: Vec<usize> = unassigned
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != slot)
            .map(|(_, &p)| p)
            .collect();
        let n = self.n;
        'candidates: for &target in &domains[point] {
            if self.used[target] {
                continue;
            }
            let mut next = domains.to_vec();
            for &other in &rest {
                let want = self.codes[point * n + other];
                let filtered: Vec<usize> = domains[other]
                    .iter()
                    .copied()
                    .filter(|&c| c != target && !self.used[c] && self.codes[target * n + c] == want)
                    .collect();
                if filtered.is_empty() {
                    continue 'candidates;
                }
                next[other] = filtered;
            }
            self.image[point] = target;
            self.used[target] = true;
            let result = self.extend(&next, &rest);
            self.used[target] = false;
            self.image[point] = usize::MAX;
            result?;
        }
        Ok(())
    }
}
