//! Exact polynomials in the two model parameters `q` and `k`.
//!
//! Every coefficient in the operator algebra is one of these. The terms are
//! kept in a `BTreeMap` keyed by `(deg_q, deg_k)` so that iteration order and
//! printing are deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for an exact rational built from two machine integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion used only at the numeric boundary.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts too large for f64: scale down by a common power of two.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Parses `"p/q"`, `"p"` or a decimal like `"1.5"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        let frac_part: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_part.abs() * &scale + frac_part;
        let signed = if neg { -mag } else { mag };
        return Some(BigRational::new(signed, scale));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0), c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    pub fn monomial(c: BigRational, deg_q: u32, deg_k: u32) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((deg_q, deg_k), c);
        }
        p
    }

    pub fn q() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn k() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn q_pow(n: u32) -> Self {
        Self::monomial(BigRational::one(), n, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(|c| c.is_one())
    }

    /// Returns the constant value when the polynomial has no `q` or `k` dependence.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, deg_q: u32, deg_k: u32) -> BigRational {
        self.terms.get(&(deg_q, deg_k)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn depends_on_k(&self) -> bool {
        self.terms.keys().any(|&(_, dk)| dk > 0)
    }

    pub fn degree_q(&self) -> u32 {
        self.terms.keys().map(|&(dq, _)| dq).max().unwrap_or(0)
    }

    pub fn degree_k(&self) -> u32 {
        self.terms.keys().map(|&(_, dk)| dk).max().unwrap_or(0)
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(key, v)| (*key, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, q: &BigRational, k: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(dq, dk), c) in &self.terms {
            acc += c * num_traits::pow(q.clone(), dq as usize) * num_traits::pow(k.clone(), dk as usize);
        }
        acc
    }

    pub fn eval_f64(&self, q: f64, k: f64) -> f64 {
        self.terms.iter().map(|(&(dq, dk), c)| rat_to_f64(c) * q.powi(dq as i32) * k.powi(dk as i32)).sum()
    }

    /// Substitutes a fixed value for `k`, leaving `q` symbolic.
    pub fn fix_k(&self, k: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (&(dq, dk), c) in &self.terms {
            out.add_term((dq, 0), c * num_traits::pow(k.clone(), dk as usize));
        }
        out
    }

    /// Substitutes a fixed value for `q`, leaving `k` symbolic.
    pub fn fix_q(&self, q: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (&(dq, dk), c) in &self.terms {
            out.add_term((0, dk), c * num_traits::pow(q.clone(), dq as usize));
        }
        out
    }

    /// The ring endomorphism `k -> k + shift`.
    pub fn shift_k(&self, shift: &BigRational) -> Poly {
        let replacement = Poly::k() + Poly::constant(shift.clone());
        let mut out = Poly::zero();
        for (&(dq, dk), c) in &self.terms {
            let mut term = replacement.pow(dk);
            term = term.scale(c);
            for ((tq, tk), tc) in term.terms {
                out.add_term((tq + dq, tk), tc);
            }
        }
        out
    }

    /// Coefficient list in powers of `k`, each a polynomial in `q` only.
    pub fn coefficients_in_k(&self) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_k() as usize + 1];
        for (&(dq, dk), c) in &self.terms {
            out[dk as usize].add_term((dq, 0), c.clone());
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest total degree first.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for key in keys {
            let c = &self.terms[&key];
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            if !mag.is_one() || key == (0, 0) {
                factors.push(fmt_rational(&mag));
            }
            match key.0 {
                0 => {}
                1 => factors.push("q".to_string()),
                n => factors.push(format!("q^{n}")),
            }
            match key.1 {
                0 => {}
                1 => factors.push("k".to_string()),
                n => factors.push(format!("k^{n}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl From<BigRational> for Poly {
    fn from(c: BigRational) -> Self {
        Poly::constant(c)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (key, c) in &rhs.terms {
            self.add_term(*key, c.clone());
        }
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (key, c) in &rhs.terms {
            self.add_term(*key, -c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(key, c)| (*key, -c.clone())).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&(aq, ak), ac) in &self.terms {
            for (&(bq, bk), bc) in &rhs.terms {
                out.add_term((aq + bq, ak + bk), ac * bc);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_k_is_a_ring_endomorphism() {
        let a = Poly::k() * Poly::k() - Poly::int(3) * Poly::q() * Poly::k();
        let b = Poly::q() + Poly::k();
        let one = rat_int(1);
        assert_eq!((&a * &b).shift_k(&one), &a.shift_k(&one) * &b.shift_k(&one));
        // k(k-1) -> (k+1)k
        let kk = Poly::k() * (Poly::k() - Poly::one());
        assert_eq!(kk.shift_k(&one), (Poly::k() + Poly::one()) * Poly::k());
    }

    #[test]
    fn eval_and_fix_agree() {
        let p = Poly::int(16) * Poly::q_pow(4) * (Poly::k() - Poly::one()) * (Poly::k() + Poly::one());
        let q = rat(3, 2);
        let k = rat(5, 2);
        assert_eq!(p.fix_k(&k).eval(&q, &rat_int(0)), p.eval(&q, &k));
        assert_eq!(p.fix_q(&q).eval(&rat_int(0), &k), p.eval(&q, &k));
        assert_eq!(p.eval(&rat_int(1), &rat_int(2)), rat_int(48));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/2"), Some(rat(3, 2)));
        assert_eq!(parse_rational("-4"), Some(rat_int(-4)));
        assert_eq!(parse_rational("1.25"), Some(rat(5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::int(8) * Poly::q_pow(2) * Poly::k() - Poly::constant(rat(1, 2));
        assert_eq!(p.to_string(), "8*q^2*k - 1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
