//! Laurent polynomials in one variable x with exact rational coefficients.
//! Terms may carry negative exponents; the zero coefficient is never stored,
//! so structural equality is canonical equality.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0)
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(coeff: Rational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut p = Self::zero();
        for (exp, coeff) in terms {
            p.add_term(exp, coeff);
        }
        p
    }

    /// Polynomial c0 + c1 x + c2 x^2 + ... from integer coefficients.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as i64, rational::rat_int(c))),
        )
    }

    fn add_term(&mut self, exp: i64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Ascending-exponent view of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (exp, coeff) in &other.terms {
            out.add_term(*exp, coeff.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (exp, coeff) in &other.terms {
            out.add_term(*exp, -coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e, c * k)).collect(),
        }
    }

    /// Multiplication by x^k, exact for any integer k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Term-wise derivative: d/dx (c x^n) = c n x^(n-1), including negative n.
    pub fn ddx(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(&e, _)| e != 0).map(|(&e, c)| {
            (e - 1, c * Rational::from(num_bigint::BigInt::from(e)))
        }))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Floating evaluation. x = 0 is rejected when negative exponents are
    /// present; otherwise only the stored terms contribute.
    pub fn eval_at(&self, x: f64) -> Result<f64> {
        if x == 0.0 && self.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::ZeroArgument);
        }
        let mut acc = 0.0;
        for (exp, coeff) in &self.terms {
            let c = coeff.to_f64().unwrap_or(f64::NAN);
            acc += c * x.powi(*exp as i32);
        }
        Ok(acc)
    }

    /// Exact rational evaluation.
    pub fn eval_rat(&self, x: &Rational) -> Result<Rational> {
        if x.is_zero() && self.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::ZeroArgument);
        }
        let mut acc = Rational::zero();
        for (exp, coeff) in &self.terms {
            let p = rational_pow(x, *exp);
            acc += coeff * p;
        }
        Ok(acc)
    }
}

fn rational_pow(x: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let base = if exp > 0 { x.clone() } else { x.recip() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &base;
    }
    acc
}

impl fmt::Display for LaurentPoly {
    /// Canonical rendering: descending exponents, explicit signs, unit
    /// coefficients elided, e.g. "2*x^2 - x^-1".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exp, coeff)) in self.terms.iter().rev().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = Signed::abs(coeff);
            let unit = mag.is_one();
            match (*exp, unit) {
                (0, _) => write!(f, "{}", format_rational(&mag))?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", format_rational(&mag))?,
                (e, true) => write!(f, "x^{}", e)?,
                (e, false) => write!(f, "{}*x^{}", format_rational(&mag), e)?,
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                LaurentPoly::$inner(self, rhs)
            }
        }
        impl std::ops::$trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                LaurentPoly::$inner(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}
