//! Coefficient functions on the layer.
//!
//! A [`RingElement`] is a finite sum of monomials
//! `coeff(q, k) * sinh^a(qx) cosh^b(qx) sin^m(qy) cos^d(qy)` where `a` and `b`
//! are [`Exponent`]s and `m`, `d` are nonnegative integers.
//!
//! Canonical form. The `y` part uses `cos^2 = 1 - sin^2`, so `d` is 0 or 1.
//! The `x` part is normalised within each exponent coset: writing
//! `a = a0 + i`, `b = b0 + j` with the representative `a0`, `b0` having
//! constant part in `[0, 1)`, the integer offsets `(i, j)` are rewritten with
//!
//! * `j >= 2`:          `c^2 -> 1 + s^2`
//! * `j <= -1, i >= 2`: `s^2 -> c^2 - 1`
//! * `j <= -1, i <= -1`: `1 -> c^2 - s^2`
//!
//! until `j` is 0 or 1, or `j <= -1` with `i` in `{0, 1}`. Those offsets form
//! a basis of `Q[s^±1, c^±1] / (c^2 - s^2 - 1)` (partial fractions in `s`
//! with respect to `1 + s^2`), so two elements are equal as functions exactly
//! when their canonical term maps coincide.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;

use super::exponent::Exponent;
use crate::error::{Error, Result};
use crate::poly::{rat_int, Poly};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Axis {
    X,
    Y,
}

/// Exponent key of a monomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MonoKey {
    pub sinh: Exponent,
    pub cosh: Exponent,
    pub sin: u32,
    pub cos: u32,
}

impl MonoKey {
    pub const ONE: MonoKey = MonoKey { sinh: Exponent::ZERO, cosh: Exponent::ZERO, sin: 0, cos: 0 };

    pub fn new(sinh: Exponent, cosh: Exponent, sin: u32, cos: u32) -> Self {
        Self { sinh, cosh, sin, cos }
    }

    pub fn times(&self, other: &MonoKey) -> MonoKey {
        MonoKey {
            sinh: self.sinh + other.sinh,
            cosh: self.cosh + other.cosh,
            sin: self.sin + other.sin,
            cos: self.cos + other.cos,
        }
    }

    pub fn depends_on_k(&self) -> bool {
        self.sinh.depends_on_k() || self.cosh.depends_on_k()
    }

    pub fn is_canonical(&self) -> bool {
        let (_, i) = self.sinh.split();
        let (_, j) = self.cosh.split();
        self.cos <= 1 && is_normal_offset(i, j)
    }
}

/// A single term, used for construction and inspection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub coeff: Poly,
    pub key: MonoKey,
}

fn is_normal_offset(i: i64, j: i64) -> bool {
    j == 0 || j == 1 || (j <= -1 && (i == 0 || i == 1))
}

thread_local! {
    static NORMAL_X: RefCell<HashMap<(i64, i64), Vec<(i64, i64, i64)>>> = RefCell::new(HashMap::new());
}

/// Expands `s^i c^j` into normal offsets with integer coefficients.
fn normal_x(i: i64, j: i64) -> Vec<(i64, i64, i64)> {
    if is_normal_offset(i, j) {
        return vec![(i, j, 1)];
    }
    if let Some(hit) = NORMAL_X.with(|m| m.borrow().get(&(i, j)).cloned()) {
        return hit;
    }
    let mut acc: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    let mut push = |terms: Vec<(i64, i64, i64)>, sign: i64| {
        for (a, b, c) in terms {
            *acc.entry((a, b)).or_insert(0) += sign * c;
        }
    };
    if j >= 2 {
        push(normal_x(i, j - 2), 1);
        push(normal_x(i + 2, j - 2), 1);
    } else if i >= 2 {
        push(normal_x(i - 2, j + 2), 1);
        push(normal_x(i - 2, j), -1);
    } else {
        push(normal_x(i, j + 2), 1);
        push(normal_x(i + 2, j), -1);
    }
    let out: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).map(|((a, b), c)| (a, b, c)).collect();
    NORMAL_X.with(|m| m.borrow_mut().insert((i, j), out.clone()));
    out
}

/// Expands `sin^m cos^d` with `cos^2 -> 1 - sin^2`.
fn normal_y(m: u32, d: u32) -> Vec<(u32, u32, i64)> {
    let pairs = d / 2;
    let rem = d % 2;
    let mut out = Vec::with_capacity(pairs as usize + 1);
    let mut binom: i64 = 1;
    for t in 0..=pairs {
        let sign = if t % 2 == 0 { 1 } else { -1 };
        out.push((m + 2 * t, rem, sign * binom));
        binom = binom * (pairs - t) as i64 / (t + 1) as i64;
    }
    out
}

/// Exact function of `(x, y)` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RingElement {
    terms: BTreeMap<MonoKey, Poly>,
}

/// Closed-form functions of `(x, y)` share the ring representation.
pub type SymFunction = RingElement;

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Poly::one())
    }

    pub fn constant(c: Poly) -> Self {
        let mut e = Self::zero();
        e.insert_raw(MonoKey::ONE, c);
        e
    }

    pub fn rational(c: BigRational) -> Self {
        Self::constant(Poly::constant(c))
    }

    pub fn monomial(coeff: Poly, key: MonoKey) -> Self {
        let mut e = Self::zero();
        e.insert_raw(key, coeff);
        e
    }

    /// Builds an element from arbitrary (possibly non-canonical) terms.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut e = Self::zero();
        for m in terms {
            e.insert_raw(m.key, m.coeff);
        }
        e
    }

    pub fn sinh_pow(a: i64) -> Self {
        Self::monomial(Poly::one(), MonoKey { sinh: Exponent::int(a), ..MonoKey::ONE })
    }

    pub fn cosh_pow(b: i64) -> Self {
        Self::monomial(Poly::one(), MonoKey { cosh: Exponent::int(b), ..MonoKey::ONE })
    }

    pub fn sin_pow(m: u32) -> Self {
        Self::monomial(Poly::one(), MonoKey { sin: m, ..MonoKey::ONE })
    }

    pub fn cos_pow(d: u32) -> Self {
        Self::monomial(Poly::one(), MonoKey { cos: d, ..MonoKey::ONE })
    }

    /// `s^a c^b S^m C^d` with integer hyperbolic powers and unit coefficient.
    pub fn term(a: i64, b: i64, m: u32, d: u32) -> Self {
        Self::monomial(Poly::one(), MonoKey::new(Exponent::int(a), Exponent::int(b), m, d))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonoKey, &Poly)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms.iter().map(|(k, c)| Monomial { coeff: c.clone(), key: *k }).collect()
    }

    /// Coefficient of a canonical key.
    pub fn coeff(&self, key: &MonoKey) -> Poly {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn has_k_exponents(&self) -> bool {
        self.terms.keys().any(MonoKey::depends_on_k)
    }

    pub fn has_k_coefficients(&self) -> bool {
        self.terms.values().any(Poly::depends_on_k)
    }

    /// Adds `coeff * key`, rewriting the key into canonical terms.
    fn insert_raw(&mut self, key: MonoKey, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        if key.is_canonical() {
            self.add_canonical(key, coeff);
            return;
        }
        let (rep_s, i) = key.sinh.split();
        let (rep_c, j) = key.cosh.split();
        let xs = normal_x(i, j);
        let ys = normal_y(key.sin, key.cos);
        for &(a, b, cx) in &xs {
            for &(m, d, cy) in &ys {
                let k2 = MonoKey { sinh: rep_s.shifted(a), cosh: rep_c.shifted(b), sin: m, cos: d };
                self.add_canonical(k2, coeff.scale(&rat_int(cx * cy)));
            }
        }
    }

    fn add_canonical(&mut self, key: MonoKey, coeff: Poly) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-runs the rewrite system. Elements are always stored canonically, so
    /// this is the identity on anything built through the public API.
    pub fn canonicalize(&self) -> RingElement {
        let mut out = RingElement::zero();
        for (k, c) in &self.terms {
            out.insert_raw(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> RingElement {
        if c.is_zero() {
            return RingElement::zero();
        }
        let mut out = RingElement::zero();
        for (k, v) in &self.terms {
            out.add_canonical(*k, v * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> RingElement {
        self.scale(&Poly::constant(c.clone()))
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.insert_raw(ka.times(kb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> RingElement {
        let mut out = RingElement::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative.
    pub fn diff(&self, axis: Axis) -> RingElement {
        let q = Poly::q();
        let mut out = RingElement::zero();
        for (key, c) in &self.terms {
            let cq = c * &q;
            match axis {
                Axis::X => {
                    // d/dx s^a c^b = q a s^(a-1) c^(b+1) + q b s^(a+1) c^(b-1)
                    if !key.sinh.is_zero() {
                        let k2 = MonoKey { sinh: key.sinh.shifted(-1), cosh: key.cosh.shifted(1), ..*key };
                        out.insert_raw(k2, &cq * &key.sinh.as_poly());
                    }
                    if !key.cosh.is_zero() {
                        let k2 = MonoKey { sinh: key.sinh.shifted(1), cosh: key.cosh.shifted(-1), ..*key };
                        out.insert_raw(k2, &cq * &key.cosh.as_poly());
                    }
                }
                Axis::Y => {
                    // d/dy S^m C^d = q m S^(m-1) C^(d+1) - q d S^(m+1) C^(d-1)
                    if key.sin > 0 {
                        let k2 = MonoKey { sin: key.sin - 1, cos: key.cos + 1, ..*key };
                        out.insert_raw(k2, cq.scale(&rat_int(key.sin as i64)));
                    }
                    if key.cos > 0 {
                        let k2 = MonoKey { sin: key.sin + 1, cos: key.cos - 1, ..*key };
                        out.insert_raw(k2, cq.scale(&rat_int(-(key.cos as i64))));
                    }
                }
            }
        }
        out
    }

    pub fn diff_n(&self, nx: u32, ny: u32) -> RingElement {
        let mut out = self.clone();
        for _ in 0..nx {
            out = out.diff(Axis::X);
        }
        for _ in 0..ny {
            out = out.diff(Axis::Y);
        }
        out
    }

    /// Substitutes a rational value for `k` in coefficients and exponents.
    pub fn fix_k(&self, k: &BigRational) -> RingElement {
        let mut out = RingElement::zero();
        for (key, c) in &self.terms {
            let k2 = MonoKey { sinh: key.sinh.fix_k(k), cosh: key.cosh.fix_k(k), ..*key };
            out.insert_raw(k2, c.fix_k(k));
        }
        out
    }

    /// The endomorphism `k -> k + shift`.
    pub fn shift_k(&self, shift: &BigRational) -> RingElement {
        let mut out = RingElement::zero();
        for (key, c) in &self.terms {
            let k2 = MonoKey { sinh: key.sinh.shift_k(shift), cosh: key.cosh.shift_k(shift), ..*key };
            out.insert_raw(k2, c.shift_k(shift));
        }
        out
    }

    /// Substitutes a rational value for `q` in the coefficients.
    pub fn fix_q(&self, q: &BigRational) -> RingElement {
        let mut out = RingElement::zero();
        for (key, c) in &self.terms {
            out.add_canonical(*key, c.fix_q(q));
        }
        out
    }

    /// Floating-point value at `(x, y)`.
    pub fn evaluate(&self, x: f64, y: f64, q: f64, k: f64) -> Result<f64> {
        let pt = TrigPoint::from_xy(x, y, q);
        if x == 0.0 && self.terms.keys().any(|key| key.sinh.value_f64(k) < 0.0) {
            return Err(Error::SingularPoint);
        }
        if x < 0.0 && self.terms.keys().any(|key| !key.sinh.fix_k_f64_is_integer(k)) {
            return Err(Error::OutsideDomain { x });
        }
        Ok(self.compile(q, k).eval(&pt))
    }

    /// Pre-evaluates coefficients and exponents for repeated evaluation.
    pub fn compile(&self, q: f64, k: f64) -> CompiledRing {
        CompiledRing {
            terms: self
                .terms
                .iter()
                .map(|(key, c)| CompiledTerm {
                    coeff: c.eval_f64(q, k),
                    sinh: key.sinh.value_f64(k),
                    cosh: key.cosh.value_f64(k),
                    sin: key.sin as i32,
                    cos: key.cos as i32,
                })
                .collect(),
        }
    }

    /// One term per line: `coeff * s^a c^b S^m C^d`.
    pub fn dump(&self) -> String {
        self.dump_with_suffix("")
    }

    pub(crate) fn dump_with_suffix(&self, suffix: &str) -> String {
        let mut out = String::new();
        for (key, c) in &self.terms {
            out.push_str(&format!("({c}) * s^{} c^{} S^{} C^{}{suffix}\n", key.sinh, key.cosh, key.sin, key.cos));
        }
        out
    }
}

impl Exponent {
    fn fix_k_f64_is_integer(&self, k: f64) -> bool {
        let v = self.value_f64(k);
        (v - v.round()).abs() < 1e-12
    }
}

/// Trigonometric and hyperbolic values at one point.
#[derive(Clone, Copy, Debug)]
pub struct TrigPoint {
    pub sinh: f64,
    pub cosh: f64,
    pub sin: f64,
    pub cos: f64,
}

impl TrigPoint {
    pub fn from_xy(x: f64, y: f64, q: f64) -> Self {
        Self { sinh: (q * x).sinh(), cosh: (q * x).cosh(), sin: (q * y).sin(), cos: (q * y).cos() }
    }

    /// Point given by `t = tanh(qx)` in `(0, 1)`, avoiding overflow near `t = 1`.
    pub fn from_tanh(t: f64, y: f64, q: f64) -> Self {
        let sech = ((1.0 - t) * (1.0 + t)).sqrt();
        Self { sinh: t / sech, cosh: 1.0 / sech, sin: (q * y).sin(), cos: (q * y).cos() }
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    coeff: f64,
    sinh: f64,
    cosh: f64,
    sin: i32,
    cos: i32,
}

/// A [`RingElement`] with `q` and `k` already substituted.
#[derive(Clone, Debug)]
pub struct CompiledRing {
    terms: Vec<CompiledTerm>,
}

fn real_pow(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() < 64.0 {
        base.powi(e as i32)
    } else {
        base.powf(e)
    }
}

impl CompiledRing {
    pub fn eval(&self, pt: &TrigPoint) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * real_pow(pt.sinh, t.sinh)
                    * real_pow(pt.cosh, t.cosh)
                    * pt.sin.powi(t.sin)
                    * pt.cos.powi(t.cos)
            })
            .sum()
    }

    /// Sum of absolute term values; the natural scale for cancellation tests.
    pub fn magnitude(&self, pt: &TrigPoint) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                (t.coeff
                    * real_pow(pt.sinh, t.sinh)
                    * real_pow(pt.cosh, t.cosh)
                    * pt.sin.powi(t.sin)
                    * pt.cos.powi(t.cos))
                .abs()
            })
            .sum()
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(key, c)| {
                let mut factors = Vec::new();
                if !c.is_one() || *key == MonoKey::ONE {
                    factors.push(format!("({c})"));
                }
                if !key.sinh.is_zero() {
                    factors.push(format!("sinh^{}", key.sinh));
                }
                if !key.cosh.is_zero() {
                    factors.push(format!("cosh^{}", key.cosh));
                }
                if key.sin > 0 {
                    factors.push(format!("sin^{}", key.sin));
                }
                if key.cos > 0 {
                    factors.push(format!("cos^{}", key.cos));
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement({self})")
    }
}

impl AddAssign<&RingElement> for RingElement {
    fn add_assign(&mut self, rhs: &RingElement) {
        for (k, c) in &rhs.terms {
            self.add_canonical(*k, c.clone());
        }
    }
}

impl SubAssign<&RingElement> for RingElement {
    fn sub_assign(&mut self, rhs: &RingElement) {
        for (k, c) in &rhs.terms {
            self.add_canonical(*k, -c);
        }
    }
}

impl Add<&RingElement> for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for RingElement {
    type Output = RingElement;
    fn add(mut self, rhs: RingElement) -> RingElement {
        self += &rhs;
        self
    }
}

impl Sub<&RingElement> for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(mut self, rhs: RingElement) -> RingElement {
        self -= &rhs;
        self
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

impl Mul<&RingElement> for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        RingElement::mul(self, rhs)
    }
}

/// `cos(n qy)` expanded in the ring (Chebyshev recurrence).
pub fn cos_multiple(n: u32) -> RingElement {
    multiple_angle(n).0
}

/// `sin(n qy)` expanded in the ring.
pub fn sin_multiple(n: u32) -> RingElement {
    multiple_angle(n).1
}

fn multiple_angle(n: u32) -> (RingElement, RingElement) {
    let c1 = RingElement::cos_pow(1);
    let s1 = RingElement::sin_pow(1);
    let two_c = c1.scale_rational(&rat_int(2));
    let (mut cos_prev, mut cos_cur) = (RingElement::one(), c1.clone());
    let (mut sin_prev, mut sin_cur) = (RingElement::zero(), s1);
    if n == 0 {
        return (cos_prev, sin_prev);
    }
    for _ in 1..n {
        let cos_next = &two_c.mul(&cos_cur) - &cos_prev;
        let sin_next = &two_c.mul(&sin_cur) - &sin_prev;
        cos_prev = std::mem::replace(&mut cos_cur, cos_next);
        sin_prev = std::mem::replace(&mut sin_cur, sin_next);
    }
    (cos_cur, sin_cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn s(a: i64) -> RingElement {
        RingElement::sinh_pow(a)
    }
    fn c(b: i64) -> RingElement {
        RingElement::cosh_pow(b)
    }

    #[test]
    fn sin_squared_is_exponent_addition() {
        let s1 = RingElement::sin_pow(1);
        assert_eq!(s1.mul(&s1), RingElement::sin_pow(2));
    }

    #[test]
    fn cos_squared_reduces() {
        let c1 = RingElement::cos_pow(1);
        assert_eq!(c1.mul(&c1), &RingElement::one() - &RingElement::sin_pow(2));
    }

    #[test]
    fn sinh_squared_times_sech_squared() {
        assert_eq!(s(2).mul(&c(-2)), &RingElement::one() - &c(-2));
    }

    #[test]
    fn pythagorean_sums_collapse() {
        let y = &RingElement::cos_pow(2) + &RingElement::sin_pow(2);
        assert_eq!(y, RingElement::one());
        let x = &s(2).mul(&c(-2)) + &c(-2);
        assert_eq!(x, RingElement::one());
        let h = &c(2) - &s(2);
        assert_eq!(h, RingElement::one());
    }

    #[test]
    fn normal_offsets_are_a_basis_sample() {
        // s^2 c^-1 = c - c^-1 and s^-1 c^-1 = s^-1 c - s c^-1
        assert_eq!(s(2).mul(&c(-1)), &c(1) - &c(-1));
        assert_eq!(s(-1).mul(&c(-1)), &RingElement::term(-1, 1, 0, 0) - &RingElement::term(1, -1, 0, 0));
    }

    #[test]
    fn derivative_examples() {
        let q = Poly::q();
        assert_eq!(s(1).diff(Axis::X), c(1).scale(&q));
        assert_eq!(s(-1).diff(Axis::X), RingElement::term(-2, 1, 0, 0).scale(&-q.clone()));
    }

    #[test]
    fn tanh_power_derivative() {
        // s^k c^-k
        let key = MonoKey::new(Exponent::k_plus(0), Exponent::minus_k_plus(0), 0, 0);
        let t = RingElement::monomial(Poly::one(), key);
        let d = t.diff(Axis::X);
        let qk = Poly::q() * Poly::k();
        let expected =
            &RingElement::monomial(qk.clone(), MonoKey::new(Exponent::k_plus(-1), Exponent::minus_k_plus(1), 0, 0))
                - &RingElement::monomial(qk, MonoKey::new(Exponent::k_plus(1), Exponent::minus_k_plus(-1), 0, 0));
        assert_eq!(d, expected);
        // numeric differentiation
        let (q, k) = (1.3, 0.7);
        for &x in &[0.2, 0.5, 1.1, 1.7] {
            let h = 1e-6;
            let fd = (t.evaluate(x + h, 0.1, q, k).unwrap() - t.evaluate(x - h, 0.1, q, k).unwrap()) / (2.0 * h);
            let an = d.evaluate(x, 0.1, q, k).unwrap();
            assert!((fd - an).abs() < 1e-7 * an.abs().max(1.0));
        }
    }

    #[test]
    fn evaluate_basics() {
        let v = RingElement::sin_pow(1).evaluate(0.3, std::f64::consts::PI / 4.0, 2.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let h = &c(2) - &s(2);
        assert!((h.evaluate(0.9, 0.2, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(s(-2).evaluate(0.0, 0.1, 1.0, 1.0), Err(Error::SingularPoint));
        assert!(s(-2).evaluate(1e-3, 0.1, 1.0, 1.0).is_ok());
    }

    #[test]
    fn multiple_angles_match_libm() {
        for n in 0..7u32 {
            let cm = cos_multiple(n);
            let sm = sin_multiple(n);
            for &y in &[0.1, 0.4, -0.9] {
                let q = 1.5;
                assert!((cm.evaluate(0.5, y, q, 1.0).unwrap() - (n as f64 * q * y).cos()).abs() < 1e-12);
                assert!((sm.evaluate(0.5, y, q, 1.0).unwrap() - (n as f64 * q * y).sin()).abs() < 1e-12);
            }
            assert!(cm.terms().all(|(k, _)| k.cos <= 1));
        }
    }

    #[test]
    fn fractional_coset_normalises() {
        let half = MonoKey::new(Exponent::rational(1, 2), Exponent::ZERO, 0, 0);
        let root = RingElement::monomial(Poly::one(), half);
        // sqrt(s) * (c^2 - s^2) == sqrt(s)
        let e = root.mul(&(&c(2) - &s(2)));
        assert_eq!(e, root);
        let _ = rat(1, 2);
    }
}
