//! Rigid metrics: two-valued metrics on six or more points with trivial
//! isometry group, and the truncated path metric that fails to be rigid.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::metric::FiniteMetricSpace;
use crate::rational::{qi, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RigidityError {
    #[error("need at least {min} points, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("distances must satisfy 0 < a < b <= 2a (a = {a}, b = {b})")]
    BadRatio { a: Q, b: Q },
}

/// Parameters of a rigid `{0, a, b}`-valued metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidSpec {
    n: usize,
    a: Q,
    b: Q,
}

impl RigidSpec {
    pub fn new(n: usize, a: Q, b: Q) -> Result<Self, RigidityError> {
        if n < 6 {
            return Err(RigidityError::TooSmall { min: 6, got: n });
        }
        if !a.is_positive() || a >= b || b > &a * qi(2) {
            return Err(RigidityError::BadRatio { a, b });
        }
        Ok(RigidSpec { n, a, b })
    }

    /// `a = 1, b = 2`.
    pub fn unit(n: usize) -> Result<Self, RigidityError> {
        Self::new(n, qi(1), qi(2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }
}

/// Neighbour set `S(x)` on points `1..=n` (1-based): a path
/// `5 – 6 – … – n` hanging off the configuration
/// `S(1) = {2}, S(2) = {1,3,4,5}, S(3) = {2,4}, S(4) = {2,3,5}, S(5) = {2,4,6}`.
pub fn neighbours(n: usize, x: usize) -> Vec<usize> {
    match x {
        1 => vec![2],
        2 => vec![1, 3, 4, 5],
        3 => vec![2, 4],
        4 => vec![2, 3, 5],
        5 => vec![2, 4, 6],
        _ if x == n => vec![n - 1],
        _ => vec![x - 1, x + 1],
    }
}

/// Points `"1"…"n"`; distance `a` between `S`-neighbours and `b` otherwise.
pub fn rigid_metric(spec: &RigidSpec) -> FiniteMetricSpace {
    let n = spec.n;
    let adjacent: Vec<Vec<usize>> = (1..=n).map(|x| neighbours(n, x)).collect();
    let labels = (1..=n).map(|x| x.to_string()).collect();
    FiniteMetricSpace::from_fn(labels, |i, j| {
        if i == j {
            Q::zero()
        } else if adjacent[i].contains(&(j + 1)) {
            spec.a.clone()
        } else {
            spec.b.clone()
        }
    })
    .expect("any {0,a,b}-valued symmetric function with b <= 2a is a metric")
}

/// Points `"0"…"N−1"` with `d(n, m) = min(|n − m|, 2)`. Its isometry group
/// contains the reflection `n ↦ N−1−n`.
pub fn rigid_metric_path(len: usize) -> Result<FiniteMetricSpace, RigidityError> {
    if len < 3 {
        return Err(RigidityError::TooSmall { min: 3, got: len });
    }
    let labels = (0..len).map(|x| x.to_string()).collect();
    Ok(FiniteMetricSpace::from_fn(labels, |i, j| qi(i.abs_diff(j).min(2) as i64))
        .expect("truncated path metric"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::search::isometries;

    #[test]
    fn spec_validation() {
        assert!(RigidSpec::new(6, qi(1), qi(2)).is_ok());
        assert_eq!(
            RigidSpec::new(6, qi(1), qi(3)),
            Err(RigidityError::BadRatio { a: qi(1), b: qi(3) })
        );
        assert!(matches!(RigidSpec::new(6, qi(2), qi(2)), Err(RigidityError::BadRatio { .. })));
        assert!(matches!(RigidSpec::new(6, qi(0), q(1, 2)), Err(RigidityError::BadRatio { .. })));
        assert_eq!(RigidSpec::unit(5), Err(RigidityError::TooSmall { min: 6, got: 5 }));
    }

    #[test]
    fn six_points_rigid() {
        let s = rigid_metric(&RigidSpec::unit(6).unwrap());
        assert_eq!(s.len(), 6);
        assert_eq!(isometries(&s).order(), 1);
    }

    #[test]
    fn twelve_points_two_three() {
        let spec = RigidSpec::new(12, qi(2), qi(3)).unwrap();
        let s = rigid_metric(&spec);
        assert_eq!(isometries(&s).order(), 1);
        for x in 1..=12 {
            for y in neighbours(12, x) {
                assert!(neighbours(12, y).contains(&x), "S not symmetric at {x}, {y}");
            }
        }
    }

    #[test]
    fn path_small() {
        let s = rigid_metric_path(3).unwrap();
        assert_eq!(s.d(0, 1), &qi(1));
        assert_eq!(s.d(0, 2), &qi(2));
        assert_eq!(isometries(&s).order(), 2);
        assert!(rigid_metric_path(2).is_err());
    }
}
