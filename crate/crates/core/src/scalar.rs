//! Scalar abstraction and exact integer helpers.
//!
//! Densities and graphon cells are generic over [`Scalar`], which is
//! implemented for `f32`, `f64` and the exact [`Rational`] type. Anything
//! that makes a claim (certificates, thresholds, counts) is computed with
//! `Rational` or big integers.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Numeric type a graphon can be evaluated over.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar")
    }

    /// `1 / n`.
    fn recip_count(n: u64) -> Self {
        Self::one() / Self::from_count(n)
    }

    fn from_rational(q: &Rational) -> Self;

    /// Slack allowed when validating sums; zero for exact types.
    fn tolerance() -> Self {
        Self::zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let diff = self.clone() - other.clone();
        diff.abs() <= Self::tolerance()
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_from_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn format_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a fraction: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// `(n)_k = n (n-1) ... (n-k+1)`, zero when `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (n - k + 1..=n).fold(BigUint::one(), |acc, x| acc * x)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    falling_factorial(n, n)
}

/// Saturating `(n)_k` for budget checks.
pub(crate) fn falling_factorial_sat(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (n - k + 1..=n).fold(1u128, |acc, x| acc.saturating_mul(x as u128))
}

pub(crate) fn pow_sat(base: u64, exp: u64) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Smallest integer strictly greater than `q`.
pub fn minimal_beating_integer(q: &Rational) -> BigInt {
    q.floor().to_integer() + 1
}

/// Exact rational upper bound of `sqrt(x)` with denominator `10^9`.
pub(crate) fn sqrt_upper_bound(x: &Rational) -> Rational {
    if !x.is_positive() {
        return Rational::zero();
    }
    let scale = BigInt::from(1_000_000_000u64);
    // floor(sqrt(x * scale^2)) + 1 over scale
    let scaled = (x * Rational::from_integer(&scale * &scale)).ceil().to_integer();
    let root = scaled.sqrt() + 1;
    Rational::new(root, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorial_edges() {
        assert_eq!(falling_factorial(0, 0), BigUint::one());
        assert_eq!(falling_factorial(5, 4), BigUint::from(120u32));
        assert_eq!(falling_factorial(2, 3), BigUint::zero());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 5), BigUint::zero());
        assert_eq!(binomial(12, 0), BigUint::one());
    }

    #[test]
    fn fractions_round_trip() {
        let q = rational(-6, 4);
        assert_eq!(format_fraction(&q), "-3/2");
        assert_eq!(parse_fraction("-3/2").unwrap(), q);
        assert_eq!(parse_fraction("7").unwrap(), rational(7, 1));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x").is_err());
    }

    #[test]
    fn beating_integer() {
        assert_eq!(minimal_beating_integer(&rational(465, 64)), BigInt::from(8));
        assert_eq!(minimal_beating_integer(&rational(8, 1)), BigInt::from(9));
    }

    #[test]
    fn sqrt_bound_is_above() {
        let x = rational(2, 1);
        let b = sqrt_upper_bound(&x);
        assert!(&b * &b >= x);
        assert!(b < rational(1_414_213_564, 1_000_000_000));
    }
}
