//! Exact ordered fields used by the geometric kernel.
//!
//! Everything above this module is generic over [`Field`]. The two shipped
//! implementations are arbitrary-precision [`BigRational`] (the default used
//! by the CLI and the root aliases) and [`Rational64`], which is faster but
//! panics on overflow and is only suitable for small inputs.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact ordered field with integer rounding.
pub trait Field:
    Clone + Ord + Hash + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
    fn from_bigint(n: &BigInt) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn from_fraction(numer: &BigInt, denom: &BigInt) -> Self {
        Self::from_bigint(numer) / Self::from_bigint(denom)
    }

    fn floor_int(&self) -> BigInt;
    fn ceil_int(&self) -> BigInt;
    fn is_integral(&self) -> bool;
    fn to_big_rational(&self) -> BigRational;
}

impl Field for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn floor_int(&self) -> BigInt {
        self.floor().to_integer()
    }

    fn ceil_int(&self) -> BigInt {
        self.ceil().to_integer()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }
}

impl Field for Rational64 {
    fn from_bigint(n: &BigInt) -> Self {
        let v = n.to_i64().expect("integer does not fit the Rational64 field");
        Rational64::from_integer(v)
    }

    fn floor_int(&self) -> BigInt {
        BigInt::from(self.floor().to_integer())
    }

    fn ceil_int(&self) -> BigInt {
        BigInt::from(self.ceil().to_integer())
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

/// Dot product of an integer row with a field vector.
pub fn dot<F: Field>(a: &[BigInt], x: &[F]) -> F {
    a.iter()
        .zip(x)
        .fold(F::zero(), |acc, (ai, xi)| {
            if ai.is_zero() {
                acc
            } else {
                acc + F::from_bigint(ai) * xi.clone()
            }
        })
}

/// Parses `p`, `-p` or `p/q` into an exact field element.
pub fn parse_fraction<F: Field>(text: &str) -> Result<F, Error> {
    let bad = || Error::InvalidNumber(text.to_string());
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer = BigInt::from_str(numer.trim()).map_err(|_| bad())?;
    let denom = BigInt::from_str(denom.trim()).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(F::from_fraction(&numer, &denom))
}

/// Decimal rendering rounded half away from zero to `digits` places.
/// Presentation only; callers mark it as approximate.
pub fn to_decimal<F: Field>(value: &F, digits: usize) -> String {
    let q = value.to_big_rational();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = q * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let negative = rounded.is_negative();
    let (int_part, frac_part) = rounded.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

/// The greedy max-coverage guarantee `1 - (1 - 1/k)^k`.
pub fn greedy_ratio<F: Field>(k: usize) -> F {
    let kf = F::from_i64(k as i64);
    let base = F::one() - F::one() / kf;
    let mut pow = F::one();
    for _ in 0..k {
        pow = pow * base.clone();
    }
    F::one() - pow
}

/// A rational upper bound on `ln(x)` for `x >= 1`, within `1e-12` of the true value.
///
/// Uses `ln x = 2 atanh((x-1)/(x+1))`; the series is summed in exact
/// arithmetic and the tail is bounded by a geometric series.
pub fn ln_upper(x: &BigRational) -> BigRational {
    assert!(*x >= BigRational::one(), "ln_upper expects x >= 1");
    let one = BigRational::one();
    let y = (x - &one) / (x + &one);
    let y2 = &y * &y;
    let tol = BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)));
    let mut sum = BigRational::zero();
    let mut term = y.clone();
    let mut n = 1u64;
    loop {
        sum += &term / BigRational::from_integer(BigInt::from(n));
        term = &term * &y2;
        n += 2;
        // remaining terms are bounded by term / (n (1 - y^2))
        let tail = &term / (BigRational::from_integer(BigInt::from(n)) * (&one - &y2));
        if tail < tol || y2.is_zero() {
            return (sum + tail) * BigRational::from_integer(BigInt::from(2));
        }
    }
}
