use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::poly::Poly;

/// An exponent of the form `constant + k_coeff * k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent {
    pub constant: Rational64,
    pub k_coeff: Rational64,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::int(0);

    pub const fn int(n: i64) -> Self {
        Self { constant: Rational64::new_raw(n, 1), k_coeff: Rational64::new_raw(0, 1) }
    }

    pub fn new(constant: Rational64, k_coeff: Rational64) -> Self {
        Self { constant, k_coeff }
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self { constant: Rational64::new(n, d), k_coeff: Rational64::zero() }
    }

    /// `k + c`.
    pub fn k_plus(c: i64) -> Self {
        Self { constant: Rational64::from_integer(c), k_coeff: Rational64::from_integer(1) }
    }

    /// `-k + c`.
    pub fn minus_k_plus(c: i64) -> Self {
        Self { constant: Rational64::from_integer(c), k_coeff: Rational64::from_integer(-1) }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.k_coeff.is_zero()
    }

    pub fn depends_on_k(&self) -> bool {
        !self.k_coeff.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.k_coeff.is_zero() && self.constant.is_integer()
    }

    /// Splits into a coset representative with constant part in `[0, 1)` and an integer offset.
    pub fn split(&self) -> (Exponent, i64) {
        let offset = self.constant.floor().to_integer();
        let rep = Exponent { constant: self.constant - Rational64::from_integer(offset), k_coeff: self.k_coeff };
        (rep, offset)
    }

    pub fn shifted(&self, n: i64) -> Exponent {
        Exponent { constant: self.constant + Rational64::from_integer(n), k_coeff: self.k_coeff }
    }

    pub fn as_poly(&self) -> Poly {
        let c = Poly::constant(to_big(self.constant));
        if self.k_coeff.is_zero() {
            c
        } else {
            c + Poly::k().scale(&to_big(self.k_coeff))
        }
    }

    pub fn value_f64(&self, k: f64) -> f64 {
        ratio_f64(self.constant) + ratio_f64(self.k_coeff) * k
    }

    pub fn fix_k(&self, k: &BigRational) -> Exponent {
        if self.k_coeff.is_zero() {
            return *self;
        }
        let v = to_big(self.constant) + to_big(self.k_coeff) * k;
        Exponent { constant: from_big(&v), k_coeff: Rational64::zero() }
    }

    pub fn shift_k(&self, shift: &BigRational) -> Exponent {
        if self.k_coeff.is_zero() {
            return *self;
        }
        let c = to_big(self.constant) + to_big(self.k_coeff) * shift;
        Exponent { constant: from_big(&c), k_coeff: self.k_coeff }
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn to_big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub(crate) fn from_big(r: &BigRational) -> Rational64 {
    let n = r.numer().to_i64().expect("exponent numerator out of range");
    let d = r.denom().to_i64().expect("exponent denominator out of range");
    Rational64::new(n, d)
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent { constant: self.constant + rhs.constant, k_coeff: self.k_coeff + rhs.k_coeff }
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        Exponent { constant: self.constant - rhs.constant, k_coeff: self.k_coeff - rhs.k_coeff }
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent { constant: -self.constant, k_coeff: -self.k_coeff }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k_coeff.is_zero() {
            write!(f, "{}", self.constant)
        } else {
            write!(f, "({} + ({})k)", self.constant, self.k_coeff)
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_keeps_value() {
        let e = Exponent::new(Rational64::new(-7, 2), Rational64::from_integer(1));
        let (rep, off) = e.split();
        assert_eq!(off, -4);
        assert_eq!(rep.constant, Rational64::new(1, 2));
        assert_eq!(rep.shifted(off), e);
    }

    #[test]
    fn fix_k_folds_into_constant() {
        let e = Exponent::minus_k_plus(-2);
        assert_eq!(e.fix_k(&crate::poly::rat(3, 2)), Exponent::rational(-7, 2));
    }
}
