//! Finite-order differential operators `sum c_ij(x, y) d_x^i d_y^j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use rayon::prelude::*;

use super::ring::{Axis, RingElement, SymFunction};
use crate::error::{Error, Result};
use crate::poly::{rat_int, Poly};

/// Highest total derivative order any composition may produce.
pub const MAX_ORDER: u32 = 8;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiffOperator {
    terms: BTreeMap<(u32, u32), RingElement>,
}

fn binomial(n: u32, r: u32) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..r {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

impl DiffOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(RingElement::one())
    }

    pub fn multiplication(f: RingElement) -> Self {
        Self::term(f, 0, 0)
    }

    pub fn constant(c: Poly) -> Self {
        Self::multiplication(RingElement::constant(c))
    }

    /// `f * d_x^i d_y^j`.
    pub fn term(f: RingElement, i: u32, j: u32) -> Self {
        let mut op = Self::zero();
        if !f.is_zero() {
            op.terms.insert((i, j), f);
        }
        op
    }

    pub fn dx() -> Self {
        Self::term(RingElement::one(), 1, 0)
    }

    pub fn dy() -> Self {
        Self::term(RingElement::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), RingElement)>>(terms: I) -> Self {
        let mut op = Self::zero();
        for (key, f) in terms {
            op.add_term(key, &f);
        }
        op
    }

    fn add_term(&mut self, key: (u32, u32), f: &RingElement) {
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += f;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `i + j` present; 0 for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn coefficient(&self, i: u32, j: u32) -> RingElement {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &RingElement)> {
        self.terms.iter()
    }

    /// Total number of monomials across all derivative slots.
    pub fn term_count(&self) -> usize {
        self.terms.values().map(RingElement::len).sum()
    }

    pub fn has_k_exponents(&self) -> bool {
        self.terms.values().any(RingElement::has_k_exponents)
    }

    pub fn scale(&self, c: &Poly) -> DiffOperator {
        DiffOperator::from_terms(self.terms.iter().map(|(key, f)| (*key, f.scale(c))))
    }

    pub fn scale_rational(&self, c: &BigRational) -> DiffOperator {
        self.scale(&Poly::constant(c.clone()))
    }

    /// Left multiplication by a function.
    pub fn left_mul(&self, f: &RingElement) -> DiffOperator {
        DiffOperator::from_terms(self.terms.iter().map(|(key, g)| (*key, f.mul(g))))
    }

    /// `self ∘ other`, using `d ∘ c = c d + (d c)` repeatedly.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        let bound = self.order() + other.order();
        if bound > MAX_ORDER {
            return Err(Error::OrderExceeded { order: bound, max: MAX_ORDER });
        }
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let lhs: Vec<_> = self.terms.iter().collect();

        let partials: Vec<DiffOperator> = other
            .terms
            .par_iter()
            .map(|(&(m, n), b)| {
                let mut derivs: HashMap<(u32, u32), RingElement> = HashMap::new();
                let mut row = b.clone();
                for r in 0..=max_i {
                    let mut cur = row.clone();
                    for t in 0..=max_j {
                        derivs.insert((r, t), cur.clone());
                        if t < max_j {
                            cur = cur.diff(Axis::Y);
                        }
                    }
                    if r < max_i {
                        row = row.diff(Axis::X);
                    }
                }
                let mut acc = DiffOperator::zero();
                for &(&(i, j), a) in &lhs {
                    for r in 0..=i {
                        for t in 0..=j {
                            let db = &derivs[&(r, t)];
                            if db.is_zero() {
                                continue;
                            }
                            let w = binomial(i, r) * binomial(j, t);
                            let mut prod = a.mul(db);
                            if w != 1 {
                                prod = prod.scale_rational(&rat_int(w));
                            }
                            acc.add_term((i - r + m, j - t + n), &prod);
                        }
                    }
                }
                acc
            })
            .collect();

        let mut out = DiffOperator::zero();
        for p in &partials {
            out = &out + p;
        }
        Ok(out)
    }

    /// `[self, other] = self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &DiffOperator) -> Result<DiffOperator> {
        Ok(&self.compose(other)? - &other.compose(self)?)
    }

    /// `{self, other} = self ∘ other + other ∘ self`.
    pub fn anticommutator(&self, other: &DiffOperator) -> Result<DiffOperator> {
        Ok(&self.compose(other)? + &other.compose(self)?)
    }

    pub fn pow(&self, n: u32) -> Result<DiffOperator> {
        let mut out = DiffOperator::identity();
        for _ in 0..n {
            out = out.compose(self)?;
        }
        Ok(out)
    }

    /// Exact image `A f`.
    pub fn apply(&self, f: &SymFunction) -> SymFunction {
        let mut out = RingElement::zero();
        for (&(i, j), c) in &self.terms {
            out += &c.mul(&f.diff_n(i, j));
        }
        out
    }

    /// Formal adjoint with respect to `dx dy`: `(c d^a)^† = (-d)^a ∘ c`.
    pub fn adjoint(&self) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero();
        for (&(i, j), c) in &self.terms {
            let deriv = DiffOperator::term(RingElement::one(), i, j);
            let mut piece = deriv.compose(&DiffOperator::multiplication(c.clone()))?;
            if (i + j) % 2 == 1 {
                piece = -piece;
            }
            out = &out + &piece;
        }
        Ok(out)
    }

    pub fn fix_k(&self, k: &BigRational) -> DiffOperator {
        DiffOperator::from_terms(self.terms.iter().map(|(key, f)| (*key, f.fix_k(k))))
    }

    pub fn shift_k(&self, shift: &BigRational) -> DiffOperator {
        DiffOperator::from_terms(self.terms.iter().map(|(key, f)| (*key, f.shift_k(shift))))
    }

    pub fn fix_q(&self, q: &BigRational) -> DiffOperator {
        DiffOperator::from_terms(self.terms.iter().map(|(key, f)| (*key, f.fix_q(q))))
    }

    /// One term per line: `coeff * s^a c^b S^m C^d * Dx^i Dy^j`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&(i, j), f) in &self.terms {
            out.push_str(&f.dump_with_suffix(&format!(" * Dx^{i} Dy^{j}")));
        }
        out
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| match (i, j) {
                (0, 0) => format!("[{c}]"),
                _ => format!("[{c}]*Dx^{i}*Dy^{j}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator({self})")
    }
}

impl Add<&DiffOperator> for &DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (key, f) in &rhs.terms {
            out.add_term(*key, f);
        }
        out
    }
}

impl Add for DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: DiffOperator) -> DiffOperator {
        &self + &rhs
    }
}

impl Sub<&DiffOperator> for &DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (key, f) in &rhs.terms {
            out.add_term(*key, &-f);
        }
        out
    }
}

impl Sub for DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: DiffOperator) -> DiffOperator {
        &self - &rhs
    }
}

impl Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        DiffOperator { terms: self.terms.iter().map(|(key, f)| (*key, -f)).collect() }
    }
}

impl Neg for DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        -&self
    }
}
