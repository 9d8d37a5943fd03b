//! Exact rational helpers: canonical parsing/formatting, certified square-root
//! brackets and a common-denominator integer view used by hot loops.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every distance, coefficient and potential.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {text:?}: {reason}")]
pub struct RationalParseError {
    pub text: String,
    pub reason: &'static str,
}

/// Parses `"p/q"`, `"p"` or their negatives into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Q, RationalParseError> {
    let fail = |reason| RationalParseError {
        text: text.to_string(),
        reason,
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer = parse_int(num).ok_or_else(|| fail("numerator is not an integer"))?;
    let denom = match den {
        Some(d) => {
            if d.starts_with('-') || d.starts_with('+') {
                return Err(fail("denominator must be unsigned"));
            }
            parse_int(d).ok_or_else(|| fail("denominator is not an integer"))?
        }
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(fail("zero denominator"));
    }
    Ok(Q::new(numer, denom))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical lowest-terms text: `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Returns `(lo, hi)` with `lo² ≤ x ≤ hi²` and `hi − lo ≤ width`, found by
/// bisection on rationals. Collapses to `(r, r)` when `x = r²` exactly.
pub fn sqrt_bracket(x: &Q, width: &Q) -> (Q, Q) {
    assert!(!x.is_negative(), "square root of a negative rational");
    assert!(width.is_positive(), "bracket width must be positive");
    if let Some(r) = exact_sqrt(x) {
        return (r.clone(), r);
    }
    let mut lo = Q::zero();
    let mut hi = if x > &Q::one() { x.clone() } else { Q::one() };
    let two = qi(2);
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Integer numerators of `values` over their least common denominator, if
/// every one fits in an `i64`. Sums and differences of two such values fit
/// comfortably in `i128`.
pub fn common_denominator_view(values: &[Q]) -> Option<Vec<i64>> {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    values
        .iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).to_i64())
        .collect()
}
