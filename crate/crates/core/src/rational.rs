//! Exact rational scalars. Arbitrary-precision integers throughout; every
//! value is kept in lowest terms with a positive denominator, which is what
//! `num_rational::BigRational` guarantees by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Rational from machine integers. Panics on a zero denominator; use
/// [`new_rational`] for checked construction from untrusted input.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

pub fn new_rational(numer: BigInt, denom: BigInt) -> Result<Rational> {
    if denom.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(numer, denom))
}

/// Parses "p/q", an integer, or a plain decimal string. A decimal is converted
/// exactly (e.g. "0.25" -> 1/4); exponent notation and non-finite spellings are
/// rejected so that no input silently rounds.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| bad())?;
        let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
        return new_rational(numer, denom).map_err(|_| bad());
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['+', '-']);
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{}{}", int_digits, frac_part);
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = BigInt::from(10u8).pow(frac_part.len() as u32);
        let signed = if neg { -numer } else { numer };
        return new_rational(signed, denom);
    }
    let numer: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from(numer))
}

/// Canonical "p/q" rendering; integers drop the denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_zero(r: &Rational) -> bool {
    r.numer().is_zero()
}

pub fn abs(r: &Rational) -> Rational {
    Signed::abs(r)
}
