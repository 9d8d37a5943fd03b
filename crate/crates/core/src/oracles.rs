//! Slow reference implementations used to cross-check the fast paths.
//!
//! Nothing here shares code with the routines it checks beyond the metric
//! and rational types.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::free_space::{vertex_pairs, Molecule};
use crate::group::Perm;
use crate::lp::{minimize, LpOutcome};
use crate::metric::FiniteMetricSpace;
use crate::rational::Q;

/// Every permutation of the points, in lexicographic order, that preserves
/// all distances.
pub fn factorial_isometries(space: &FiniteMetricSpace) -> Vec<Perm> {
    let n = space.len();
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if (0..n).all(|i| (0..n).all(|j| space.d(i, j) == space.d(current[i], current[j]))) {
            out.push(Perm::new(current.clone()).expect("permutation"));
        }
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else { break };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("successor");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Plain backtracking: assign images point by point, checking distances to
/// already assigned points only. No colour refinement or ordering.
pub fn unpruned_isometries(space: &FiniteMetricSpace) -> Vec<Perm> {
    fn go(space: &FiniteMetricSpace, image: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        let n = space.len();
        let i = image.len();
        if i == n {
            out.push(Perm::new(image.clone()).expect("permutation"));
            return;
        }
        for y in 0..n {
            if used[y] || (0..i).any(|j| space.d(i, j) != space.d(y, image[j])) {
                continue;
            }
            used[y] = true;
            image.push(y);
            go(space, image, used, out);
            image.pop();
            used[y] = false;
        }
    }
    let mut out = Vec::new();
    go(space, &mut Vec::new(), &mut vec![false; space.len()], &mut out);
    out.sort();
    out
}

/// Transport cost as a linear program over all ordered pairs: minimize
/// `Σ d(p, q) f(p, q)` subject to `Σ_q f(p, q) − Σ_q f(q, p) = m(p)`.
pub fn transport_lp(m: &Molecule<'_>) -> Q {
    let space = m.base();
    let n = space.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q))).collect();
    if pairs.is_empty() {
        return Q::zero();
    }
    let cost: Vec<Q> = pairs.iter().map(|&(p, q)| space.d(p, q).clone()).collect();
    let a: Vec<Vec<Q>> = (0..n)
        .map(|x| {
            pairs
                .iter()
                .map(|&(p, q)| {
                    if p == x {
                        Q::one()
                    } else if q == x {
                        -Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    match minimize(&cost, &a, m.coeffs()) {
        LpOutcome::Optimal { value, .. } => value,
        other => panic!("balanced transport is always feasible and bounded: {other:?}"),
    }
}

/// Largest pairing `Σ m(x) f(x)` over 1-Lipschitz `f` with `f(x₀) = 0`,
/// as a linear program with `f = f⁺ − f⁻`.
pub fn lipschitz_dual_lp(m: &Molecule<'_>) -> Q {
    let space = m.base();
    let n = space.len();
    if n < 2 {
        return Q::zero();
    }
    // Variables: f⁺ (n), f⁻ (n), one slack per ordered pair p ≠ q.
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q))).collect();
    let width = 2 * n + pairs.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, &(p, q)) in pairs.iter().enumerate() {
        // f(p) − f(q) + s = d(p, q)
        let mut row = vec![Q::zero(); width];
        row[p] += Q::one();
        row[n + p] -= Q::one();
        row[q] -= Q::one();
        row[n + q] += Q::one();
        row[2 * n + k] = Q::one();
        a.push(row);
        b.push(space.d(p, q).clone());
    }
    let mut pin = vec![Q::zero(); width];
    pin[0] = Q::one();
    pin[n] = -Q::one();
    a.push(pin);
    b.push(Q::zero());
    let mut cost = vec![Q::zero(); width];
    for (x, c) in m.coeffs().iter().enumerate() {
        cost[x] = -c;
        cost[n + x] = c.clone();
    }
    match minimize(&cost, &a, &b) {
        LpOutcome::Optimal { value, .. } => -value,
        other => panic!("bounded dual: {other:?}"),
    }
}

/// The functional `x ↦ (d(x, q) − d(x, p) + d(p, q))/2` evaluated on each
/// normalized elementary molecule, in [`vertex_pairs`] order. It equals 1 on
/// the vertex for `(p, q)`; strict triangle inequality makes it `< 1` on all
/// others.
pub fn exposing_values(space: &FiniteMetricSpace, p: usize, q: usize) -> Vec<Q> {
    let two = Q::one() + Q::one();
    let f: Vec<Q> = (0..space.len())
        .map(|x| (space.d(x, q) - space.d(x, p) + space.d(p, q)) / &two)
        .collect();
    vertex_pairs(space.len())
        .into_iter()
        .map(|(a, b)| (&f[a] - &f[b]) / space.d(a, b))
        .collect()
}

/// Ball symmetries by trying every assignment of basis images among the
/// vertices, then checking the full vertex set. Returns sorted vertex
/// permutations.
pub fn unpruned_ball_symmetries(space: &FiniteMetricSpace) -> Vec<Vec<usize>> {
    let k = space.len();
    if k < 2 {
        return vec![Vec::new()];
    }
    let dim = k - 1;
    let pairs = vertex_pairs(k);
    let coords: Vec<Vec<Q>> = pairs
        .iter()
        .map(|&(p, q)| {
            // (χ_p − χ_q)/d in the basis (χ_0 − χ_i)/d(0, i).
            let d = space.d(p, q);
            (1..k)
                .map(|i| {
                    let mut c = Q::zero();
                    if i == p {
                        c -= space.d(0, i) / d;
                    }
                    if i == q {
                        c += space.d(0, i) / d;
                    }
                    c
                })
                .collect()
        })
        .collect();
    let count = coords.len();
    let mut out = Vec::new();
    let mut choice = vec![0usize; dim];
    loop {
        let mut perm = Vec::with_capacity(count);
        for c in &coords {
            let mut img = vec![Q::zero(); dim];
            for (t, x) in c.iter().enumerate() {
                for (o, y) in img.iter_mut().zip(&coords[choice[t]]) {
                    *o += x * y;
                }
            }
            match coords.iter().position(|v| *v == img) {
                Some(w) => perm.push(w),
                None => break,
            }
        }
        if perm.len() == count {
            let mut seen = perm.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() == count {
                out.push(perm);
            }
        }
        let mut t = 0;
        loop {
            if t == dim {
                out.sort();
                return out;
            }
            choice[t] += 1;
            if choice[t] < count {
                break;
            }
            choice[t] = 0;
            t += 1;
        }
    }
}
