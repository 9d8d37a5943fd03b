//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Sized for the small systems this crate meets (tens of variables): the
//! tableau is rebuilt row by row and reduced costs are recomputed at every
//! pivot.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Q>, value: Q },
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = Q::one() / &self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = &*v - &factor * p;
                }
            }
            self.rhs[r] = &self.rhs[r] - &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Q], col: usize) -> Q {
        let mut r = cost[col].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][col].is_zero() {
                r -= &cost[b] * &self.rows[i][col];
            }
        }
        r
    }

    /// Minimizes `cost` over the current basis using columns `< allowed`.
    /// Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else { return true };
            let mut leave: Option<(Q, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col].is_positive() {
                    let ratio = &self.rhs[i] / &row[col];
                    let better = match &leave {
                        None => true,
                        Some((best, _, b)) => ratio < *best || (ratio == *best && self.basis[i] < *b),
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match leave {
                Some((_, row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn minimize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length");
    assert!(a.iter().all(|row| row.len() == n), "constraint width");

    // Phase I: artificial column n + i for row i, rows sign-normalized.
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Q> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        rows.push(r);
        rhs.push(if flip { -bi } else { bi.clone() });
    }
    let mut t = Tableau { rows, rhs, basis: (n..n + m).collect() };
    let mut phase1 = vec![Q::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = Q::one();
    }
    t.optimize(&phase1, n + m);
    let infeasibility: Q = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-level) artificials out, dropping redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(col) => t.pivot(r, col),
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Q::zero()));
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (&b, v) in t.basis.iter().zip(&t.rhs) {
        x[b] = v.clone();
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

/// Some `x ≥ 0` with `A x = b`, if one exists.
pub fn feasible_point(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    match minimize(&vec![Q::zero(); n], a, b) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn small_optimum() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a = vec![
            vec![qi(1), qi(2), qi(1), qi(0)],
            vec![qi(3), qi(1), qi(0), qi(1)],
        ];
        let c = vec![qi(-1), qi(-1), qi(0), qi(0)];
        match minimize(&c, &a, &[qi(4), qi(6)]) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(-14, 5));
                assert_eq!(&x[..2], &[q(8, 5), q(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![qi(1), qi(1)]];
        assert_eq!(minimize(&[qi(0), qi(0)], &a, &[qi(-1)]), LpOutcome::Infeasible);
        let a = vec![vec![qi(1), qi(-1)]];
        assert_eq!(minimize(&[qi(0), qi(-1)], &a, &[qi(1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![qi(1), qi(1)], vec![qi(2), qi(2)]];
        let x = feasible_point(&a, &[qi(1), qi(2)]).unwrap();
        assert_eq!(&x[0] + &x[1], qi(1));
    }
}
