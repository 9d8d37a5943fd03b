#![allow(dead_code)]

use isoforge_core::metric::FiniteMetricSpace;
use isoforge_core::rational::{q, Q};
use proptest::prelude::*;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Shortest-path closure of symmetric positive edge weights: always a metric.
pub fn closure_metric(n: usize, weights: &[Q]) -> FiniteMetricSpace {
    let mut d = vec![vec![Q::from_integer(0.into()); n]; n];
    let mut w = weights.iter().cycle();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = w.next().expect("weights").clone();
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(labels(n), d).expect("path metric")
}

/// Random metric space on `lo..=hi` points. Weights are drawn from a small
/// pool so that nontrivial symmetries show up often.
pub fn arb_space(lo: usize, hi: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (lo..=hi, 1i64..=6, proptest::collection::vec(1i64..=4, 28)).prop_map(|(n, den, nums)| {
        let weights: Vec<Q> = nums.iter().map(|&a| q(a + den, den)).collect();
        closure_metric(n, &weights)
    })
}

/// Random metric whose weights lie in `[1, 2)`, so the triangle inequality
/// is strict everywhere.
pub fn arb_strict_space(lo: usize, hi: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (lo..=hi, proptest::collection::vec(0i64..=5, 28)).prop_map(|(n, nums)| {
        let weights: Vec<Q> = nums.iter().map(|&a| q(6 + a, 6)).collect();
        closure_metric(n, &weights)
    })
}

pub fn arb_coeffs(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec((-6i64..=6, 1i64..=4), n).prop_map(|raw| {
        let mut c: Vec<Q> = raw.iter().map(|&(a, b)| q(a, b)).collect();
        let total: Q = c.iter().sum();
        if let Some(last) = c.last_mut() {
            *last -= total;
        }
        c
    })
}
