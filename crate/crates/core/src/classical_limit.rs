//! The classical system: phase-space functions, canonical Poisson brackets,
//! the quadratic Poisson algebra of `A_c = R_c`, `B_c = L_c`, and its
//! vanishing Casimir.
//!
//! Ring coefficients reuse [`Poly`] with `q` standing for `Q` and `k` for
//! `Kc`; exponents never involve `Kc`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::Signed;

use crate::algebra_verify::{AlgebraCoefficients, CasimirPolynomial, HPoly};
use crate::error::{Error, Result};
use crate::model::{Mutation, OperatorName};
use crate::poly::{fmt_rational, Poly};
use crate::report::VerificationReport;
use crate::symkernel::{Axis, RingElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalParams {
    pub q: BigRational,
    pub kc: BigRational,
}

impl ClassicalParams {
    pub fn new(q: BigRational, kc: BigRational) -> Result<Self> {
        if !q.is_positive() || !kc.is_positive() {
            return Err(Error::InvalidParams(format!(
                "Q and Kc must be positive, got Q={}, Kc={}",
                fmt_rational(&q),
                fmt_rational(&kc)
            )));
        }
        Ok(Self { q, kc })
    }

    pub fn from_ratios(qn: i64, qd: i64, kn: i64, kd: i64) -> Result<Self> {
        Self::new(crate::poly::rat(qn, qd), crate::poly::rat(kn, kd))
    }
}

impl fmt::Display for ClassicalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q={}, Kc={}", fmt_rational(&self.q), fmt_rational(&self.kc))
    }
}

/// `Σ f_ab(X, Y) P_X^a P_Y^b`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PhaseSpacePolynomial {
    terms: BTreeMap<(u32, u32), RingElement>,
}

impl PhaseSpacePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn function(f: RingElement) -> Self {
        Self::term(f, 0, 0)
    }

    pub fn constant(c: Poly) -> Self {
        Self::function(RingElement::constant(c))
    }

    pub fn term(f: RingElement, a: u32, b: u32) -> Self {
        let mut out = Self::zero();
        out.add_term((a, b), &f);
        out
    }

    pub fn px() -> Self {
        Self::term(RingElement::one(), 1, 0)
    }

    pub fn py() -> Self {
        Self::term(RingElement::one(), 0, 1)
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

    pub fn coefficient(&self, a: u32, b: u32) -> RingElement {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &RingElement)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.values().map(RingElement::len).sum()
    }

    /// Total momentum degree.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Poly) -> Self {
        let mut out = Self::zero();
        for (key, f) in &self.terms {
            out.add_term(*key, &f.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), f) in &self.terms {
            for (&(c, d), g) in &other.terms {
                out.add_term((a + c, b + d), &f.mul(g));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(Poly::one()), |acc, _| acc.mul(self))
    }

    /// Partial derivative in a position variable.
    pub fn diff_pos(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (key, f) in &self.terms {
            out.add_term(*key, &f.diff(axis));
        }
        out
    }

    /// Partial derivative in the conjugate momentum.
    pub fn diff_mom(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (&(a, b), f) in &self.terms {
            let (n, key) = match axis {
                Axis::X if a > 0 => (a, (a - 1, b)),
                Axis::Y if b > 0 => (b, (a, b - 1)),
                _ => continue,
            };
            out.add_term(key, &f.scale(&Poly::int(n as i64)));
        }
        out
    }

    pub fn fix_k(&self, kc: &BigRational) -> Self {
        let mut out = Self::zero();
        for (key, f) in &self.terms {
            out.add_term(*key, &f.fix_k(kc));
        }
        out
    }

    /// Value at a phase-space point.
    pub fn evaluate(&self, x: f64, y: f64, px: f64, py: f64, q: f64, kc: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (&(a, b), f) in &self.terms {
            acc += f.evaluate(x, y, q, kc)? * px.powi(a as i32) * py.powi(b as i32);
        }
        Ok(acc)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&(a, b), f) in &self.terms {
            out.push_str(&f.dump_with_suffix(&format!(" * PX^{a} PY^{b}")));
        }
        out
    }
}

impl fmt::Display for PhaseSpacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(&(a, b), c)| format!("[{c}]*PX^{a}*PY^{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PhaseSpacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseSpacePolynomial({self})")
    }
}

impl Add<&PhaseSpacePolynomial> for &PhaseSpacePolynomial {
    type Output = PhaseSpacePolynomial;
    fn add(self, rhs: &PhaseSpacePolynomial) -> PhaseSpacePolynomial {
        let mut out = self.clone();
        for (key, f) in &rhs.terms {
            out.add_term(*key, f);
        }
        out
    }
}

impl Sub<&PhaseSpacePolynomial> for &PhaseSpacePolynomial {
    type Output = PhaseSpacePolynomial;
    fn sub(self, rhs: &PhaseSpacePolynomial) -> PhaseSpacePolynomial {
        let mut out = self.clone();
        for (key, f) in &rhs.terms {
            out.add_term(*key, &-f);
        }
        out
    }
}

impl Neg for &PhaseSpacePolynomial {
    type Output = PhaseSpacePolynomial;
    fn neg(self) -> PhaseSpacePolynomial {
        self.scale(&-Poly::one())
    }
}

/// `re + i·im` for the complex intertwiners `η_c`, `η̄_c` and conjugates.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ComplexPhaseSpace {
    pub re: PhaseSpacePolynomial,
    pub im: PhaseSpacePolynomial,
}

impl ComplexPhaseSpace {
    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re.mul(&other.re) - &self.im.mul(&other.im),
            im: &self.re.mul(&other.im) + &self.im.mul(&other.re),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

/// Canonical bracket `Σ ∂f/∂X ∂g/∂P_X − ∂f/∂P_X ∂g/∂X` over both axes.
pub fn poisson_bracket(f: &PhaseSpacePolynomial, g: &PhaseSpacePolynomial) -> PhaseSpacePolynomial {
    let mut out = PhaseSpacePolynomial::zero();
    for axis in [Axis::X, Axis::Y] {
        out = &out + &f.diff_pos(axis).mul(&g.diff_mom(axis));
        out = &out - &f.diff_mom(axis).mul(&g.diff_pos(axis));
    }
    out
}

fn fterm(a: i64, b: i64, m: u32, d: u32) -> RingElement {
    RingElement::term(a, b, m, d)
}

fn q2k2() -> Poly {
    Poly::q_pow(2) * Poly::k() * Poly::k()
}

/// `η_c` (`bar = false`) or `η̄_c` (`bar = true`), with `Kc` symbolic.
/// `flip` negates the sinh·sin `P_Y` term of `η̄_c`.
fn intertwiner(bar: bool, flip: bool) -> ComplexPhaseSpace {
    let sign = if flip { -Poly::one() } else { Poly::one() };
    let (px_f, py_f, w) = if bar {
        (fterm(0, 1, 0, 1), fterm(1, 0, 1, 0).scale(&sign), fterm(-1, 0, 0, 1))
    } else {
        (fterm(0, 1, 1, 0), fterm(1, 0, 0, 1).scale(&-Poly::one()), fterm(-1, 0, 1, 0))
    };
    ComplexPhaseSpace {
        re: PhaseSpacePolynomial::function(w.scale(&-(Poly::q() * Poly::k()))),
        im: &PhaseSpacePolynomial::term(px_f, 1, 0) + &PhaseSpacePolynomial::term(py_f, 0, 1),
    }
}

fn r_classical(bar: bool) -> PhaseSpacePolynomial {
    let (sy2, cy2) = if bar { (fterm(0, 0, 0, 2), fterm(0, 0, 2, 0)) } else { (fterm(0, 0, 2, 0), fterm(0, 0, 0, 2)) };
    let mixed = if bar { Poly::int(2) } else { Poly::int(-2) };
    let parts = [
        PhaseSpacePolynomial::term(fterm(0, 2, 0, 0).mul(&sy2), 2, 0),
        PhaseSpacePolynomial::term(fterm(1, 1, 1, 1).scale(&mixed), 1, 1),
        PhaseSpacePolynomial::term(fterm(2, 0, 0, 0).mul(&cy2), 0, 2),
        PhaseSpacePolynomial::function(fterm(-2, 0, 0, 0).mul(&sy2).scale(&q2k2())),
    ];
    parts.iter().fold(PhaseSpacePolynomial::zero(), |acc, p| &acc + p)
}

fn h_classical() -> PhaseSpacePolynomial {
    let c2 = fterm(0, 2, 0, 0);
    let parts = [
        PhaseSpacePolynomial::term(c2.clone(), 2, 0),
        PhaseSpacePolynomial::term(c2, 0, 2),
        PhaseSpacePolynomial::function(fterm(-2, 0, 0, 0).scale(&q2k2())),
    ];
    parts.iter().fold(PhaseSpacePolynomial::zero(), |acc, p| &acc + p)
}

/// Classical intertwiners: `Eta`, `EtaDag` (`η_c*`), `EtaBar`, `EtaBarDag`.
pub fn classical_intertwiner(name: OperatorName, cp: &ClassicalParams) -> Result<ComplexPhaseSpace> {
    classical_intertwiner_with(name, cp, Mutation::None)
}

pub fn classical_intertwiner_with(
    name: OperatorName,
    cp: &ClassicalParams,
    mutation: Mutation,
) -> Result<ComplexPhaseSpace> {
    let flip = mutation == Mutation::EtaBarSign;
    let z = match name {
        OperatorName::Eta => intertwiner(false, false),
        OperatorName::EtaDag => intertwiner(false, false).conj(),
        OperatorName::EtaBar => intertwiner(true, flip),
        OperatorName::EtaBarDag => intertwiner(true, flip).conj(),
        other => return Err(Error::InvalidParams(format!("`{other}` is not an intertwiner"))),
    };
    Ok(ComplexPhaseSpace { re: z.re.fix_k(&cp.kc), im: z.im.fix_k(&cp.kc) })
}

/// Real classical counterpart of an operator. `H1` has the same limit as
/// `H`; `∂_y` and the complex intertwiners have no real limit.
pub fn classical_object(name: OperatorName, cp: &ClassicalParams) -> Result<PhaseSpacePolynomial> {
    use OperatorName::*;
    let f = match name {
        H | H1 => h_classical(),
        L => PhaseSpacePolynomial::term(RingElement::one(), 0, 2),
        R => r_classical(false),
        Rbar => r_classical(true),
        Xi => PhaseSpacePolynomial::function(fterm(-1, 0, 1, 0)),
        XiBar => PhaseSpacePolynomial::function(fterm(-1, 0, 0, 1)),
        MassInv => PhaseSpacePolynomial::function(fterm(0, 2, 0, 0)),
        Veff => PhaseSpacePolynomial::function(fterm(-2, 0, 0, 0).scale(&q2k2())),
        Eta | EtaDag | EtaBar | EtaBarDag | Dy => {
            return Err(Error::InvalidParams(format!("`{name}` has no real classical counterpart")))
        }
    };
    Ok(f.fix_k(&cp.kc))
}

/// `C_c = 2Q P_Y (η_c* η̄_c + η̄_c* η_c)`.
pub fn classical_c(cp: &ClassicalParams) -> Result<PhaseSpacePolynomial> {
    classical_c_with(cp, Mutation::None)
}

pub fn classical_c_with(cp: &ClassicalParams, mutation: Mutation) -> Result<PhaseSpacePolynomial> {
    use OperatorName::*;
    let z = |n| classical_intertwiner_with(n, cp, mutation);
    let sum = z(EtaDag)?.mul(&z(EtaBar)?).add(&z(EtaBarDag)?.mul(&z(Eta)?));
    if !sum.is_real() {
        return Err(Error::ResidualNonzero {
            identity: "Im(eta_c* eta_bar_c + eta_bar_c* eta_c) = 0".into(),
            terms: sum.im.term_count(),
            dump: sum.im.dump(),
        });
    }
    Ok(PhaseSpacePolynomial::py().mul(&sum.re).scale(&(Poly::int(2) * Poly::q())))
}

/// Structure constants of the Poisson algebra as polynomials in `H_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCoefficients {
    pub alpha: HPoly,
    pub gamma: HPoly,
    pub a: HPoly,
    pub delta: HPoly,
    pub epsilon: HPoly,
    pub zeta: HPoly,
    pub d: HPoly,
    pub z: HPoly,
}

impl ClassicalCoefficients {
    /// `α_c = γ_c = −8Q²`, `δ_c = 8Q²H_c`, `ε_c = −16Q⁴Kc²`, the rest zero (symbolic `Kc`).
    pub fn published() -> Self {
        let q2 = Poly::q_pow(2);
        Self {
            alpha: HPoly::constant(Poly::int(-8) * q2.clone()),
            gamma: HPoly::constant(Poly::int(-8) * q2.clone()),
            a: HPoly::zero(),
            delta: HPoly::linear(Poly::zero(), Poly::int(8) * q2),
            epsilon: HPoly::constant(Poly::int(-16) * Poly::q_pow(4) * Poly::k() * Poly::k()),
            zeta: HPoly::zero(),
            d: HPoly::zero(),
            z: HPoly::zero(),
        }
    }

    fn all(&self) -> [(&'static str, &HPoly); 8] {
        [
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("a", &self.a),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("zeta", &self.zeta),
            ("d", &self.d),
            ("z", &self.z),
        ]
    }

    pub fn fix_k(&self, kc: &BigRational) -> Self {
        Self {
            alpha: self.alpha.fix_k(kc),
            gamma: self.gamma.fix_k(kc),
            a: self.a.fix_k(kc),
            delta: self.delta.fix_k(kc),
            epsilon: self.epsilon.fix_k(kc),
            zeta: self.zeta.fix_k(kc),
            d: self.d.fix_k(kc),
            z: self.z.fix_k(kc),
        }
    }
}

/// Lowest power of `ħ` in each coefficient after `q = ħQ`, `k = Kc/ħ`
/// (with `H` of order one), and the part at that power.
pub fn hbar_expand(p: &Poly) -> Option<(i64, Poly)> {
    let lowest = p.terms().map(|(&(dq, dk), _)| dq as i64 - dk as i64).min()?;
    let mut part = Poly::zero();
    for (&(dq, dk), c) in p.terms() {
        if dq as i64 - dk as i64 == lowest {
            part += &Poly::monomial(c.clone(), dq, dk);
        }
    }
    Some((lowest, part))
}

/// `−lim ħ⁻² c` for an `H`-polynomial coefficient, or `None` when some term
/// is of lower order than `ħ²` (the limit would diverge).
fn classical_limit_of(h: &HPoly) -> Option<HPoly> {
    let mut out = Vec::new();
    for c in h.coeffs() {
        match hbar_expand(c) {
            None => out.push(Poly::zero()),
            Some((lowest, _)) if lowest < 2 => return None,
            Some((2, part)) => out.push(-part),
            Some(_) => out.push(Poly::zero()),
        }
    }
    Some(HPoly::new(out))
}

/// The quantum structure constants sent through `q = ħQ`, `k = Kc/ħ`,
/// `(iħ)⁻¹[·,·] → {·,·}`; with `[A, C] ~ (iħ)² {A_c, C_c}` each classical
/// constant is `−lim ħ⁻²` of its quantum counterpart.
pub fn classical_coefficients_from_quantum(co: &AlgebraCoefficients) -> Option<ClassicalCoefficients> {
    let c = |x: &Poly| HPoly::constant(x.clone());
    Some(ClassicalCoefficients {
        alpha: classical_limit_of(&c(&co.alpha))?,
        gamma: classical_limit_of(&c(&co.gamma))?,
        a: classical_limit_of(&c(&co.a))?,
        delta: classical_limit_of(&co.delta)?,
        epsilon: classical_limit_of(&co.epsilon)?,
        zeta: classical_limit_of(&co.zeta)?,
        d: classical_limit_of(&co.d)?,
        z: classical_limit_of(&co.z)?,
    })
}

/// Classical generators with `Kc` fixed.
pub struct ClassicalGenerators {
    pub a: PhaseSpacePolynomial,
    pub b: PhaseSpacePolynomial,
    pub c: PhaseSpacePolynomial,
    pub h: PhaseSpacePolynomial,
    pub rbar: PhaseSpacePolynomial,
}

impl ClassicalGenerators {
    pub fn new(cp: &ClassicalParams) -> Result<Self> {
        Self::with_mutation(cp, Mutation::None)
    }

    pub fn with_mutation(cp: &ClassicalParams, mutation: Mutation) -> Result<Self> {
        Ok(Self {
            a: classical_object(OperatorName::R, cp)?,
            b: classical_object(OperatorName::L, cp)?,
            c: classical_c_with(cp, mutation)?,
            h: classical_object(OperatorName::H, cp)?,
            rbar: classical_object(OperatorName::Rbar, cp)?,
        })
    }
}

fn h_eval(c: &HPoly, h: &PhaseSpacePolynomial) -> PhaseSpacePolynomial {
    c.coeffs()
        .iter()
        .rev()
        .fold(PhaseSpacePolynomial::zero(), |acc, x| &acc.mul(h) + &PhaseSpacePolynomial::constant(x.clone()))
}

/// Classical Casimir
/// `K_c = C² + ⅔a A³ − 2α A²B − 2γ AB² + d A² − 2δ AB − ε B² + 2z A − 2ζ B`,
/// the `ħ²` part of the quantum sixth-order formula.
pub fn classical_casimir(g: &ClassicalGenerators, co: &ClassicalCoefficients) -> PhaseSpacePolynomial {
    let e = |c: &HPoly| h_eval(c, &g.h);
    let (a, b) = (&g.a, &g.b);
    let a2 = a.mul(a);
    let b2 = b.mul(b);
    let ab = a.mul(b);
    let parts = [
        g.c.mul(&g.c),
        e(&co.a).mul(&a2.mul(a)).scale(&Poly::constant(crate::poly::rat(2, 3))),
        e(&co.alpha).mul(&a2.mul(b)).scale(&Poly::int(-2)),
        e(&co.gamma).mul(&a.mul(&b2)).scale(&Poly::int(-2)),
        e(&co.d).mul(&a2),
        e(&co.delta).mul(&ab).scale(&Poly::int(-2)),
        -&e(&co.epsilon).mul(&b2),
        e(&co.z).mul(a).scale(&Poly::int(2)),
        e(&co.zeta).mul(b).scale(&Poly::int(-2)),
    ];
    parts.iter().fold(PhaseSpacePolynomial::zero(), |acc, p| &acc + p)
}

fn record(report: &mut VerificationReport, identity: &str, residual: &PhaseSpacePolynomial) {
    report.push(identity, residual.is_zero(), residual.term_count());
    if !residual.is_zero() {
        report.annotate_last(residual.dump().lines().take(12).collect::<Vec<_>>().join("\n"));
    }
}

/// Every classical identity: the sum rule, the three conserved integrals,
/// `{A_c, B_c} = C_c`, both quadratic Poisson relations, the Jacobi identity,
/// the vanishing Casimir and the `ħ → 0` consistency of the coefficients.
pub fn classical_algebra_check(cp: &ClassicalParams) -> Result<VerificationReport> {
    classical_algebra_check_with(cp, Mutation::None)
}

/// Only [`Mutation::EtaBarSign`] has a classical counterpart; the other
/// mutations leave the classical suite unchanged.
pub fn classical_algebra_check_with(cp: &ClassicalParams, mutation: Mutation) -> Result<VerificationReport> {
    let g = match ClassicalGenerators::with_mutation(cp, mutation) {
        Ok(g) => g,
        Err(Error::ResidualNonzero { identity, terms, dump }) => {
            let mut report = VerificationReport::new();
            report.push(identity, false, terms);
            report.annotate_last(dump);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let co = ClassicalCoefficients::published().fix_k(&cp.kc);
    let mut report = VerificationReport::new();
    let e = |c: &HPoly| h_eval(c, &g.h);
    let (a, b, c) = (&g.a, &g.b, &g.c);

    record(&mut report, "H_c = L_c + R_c + Rbar_c", &(&g.h - &(&(b + a) + &g.rbar)));
    record(&mut report, "{H_c, L_c} = 0", &poisson_bracket(&g.h, b));
    record(&mut report, "{H_c, R_c} = 0", &poisson_bracket(&g.h, a));
    record(&mut report, "{H_c, Rbar_c} = 0", &poisson_bracket(&g.h, &g.rbar));
    record(&mut report, "{A_c, B_c} = C_c", &(&poisson_bracket(a, b) - c));

    let ab = a.mul(b);
    let rhs_ac = [
        e(&co.alpha).mul(&a.mul(a)),
        e(&co.gamma).mul(&ab).scale(&Poly::int(2)),
        e(&co.delta).mul(a),
        e(&co.epsilon).mul(b),
        e(&co.zeta),
    ]
    .iter()
    .fold(PhaseSpacePolynomial::zero(), |acc, p| &acc + p);
    record(
        &mut report,
        "{A_c, C_c} = alpha_c A_c^2 + 2 gamma_c A_c B_c + delta_c A_c + epsilon_c B_c + zeta_c",
        &(&poisson_bracket(a, c) - &rhs_ac),
    );
    let rhs_bc = [
        e(&co.a).mul(&a.mul(a)),
        -&e(&co.gamma).mul(&b.mul(b)),
        e(&co.alpha).mul(&ab).scale(&Poly::int(-2)),
        e(&co.d).mul(a),
        -&e(&co.delta).mul(b),
        e(&co.z),
    ]
    .iter()
    .fold(PhaseSpacePolynomial::zero(), |acc, p| &acc + p);
    record(
        &mut report,
        "{B_c, C_c} = a_c A_c^2 - gamma_c B_c^2 - 2 alpha_c A_c B_c + d_c A_c - delta_c B_c + z_c",
        &(&poisson_bracket(b, c) - &rhs_bc),
    );

    let jacobi = &(&poisson_bracket(a, &poisson_bracket(b, c)) + &poisson_bracket(b, &poisson_bracket(c, a)))
        + &poisson_bracket(c, &poisson_bracket(a, b));
    record(&mut report, "Jacobi cyclic sum on (A_c, B_c, C_c) = 0", &jacobi);
    record(&mut report, "K_c = 0", &classical_casimir(&g, &co));

    // ħ-scaling consistency with the quantum coefficient set.
    match classical_coefficients_from_quantum(&AlgebraCoefficients::published()) {
        Some(lim) => {
            let lim = lim.fix_k(&cp.kc);
            for ((name, got), (_, want)) in lim.all().iter().zip(co.all().iter()) {
                report.push(format!("{name}_c = -lim hbar^-2 {name}"), got == want, 0);
            }
        }
        None => report.push("quantum coefficients are O(hbar^2)", false, 0),
    }
    let k_order = CasimirPolynomial::expected()
        .as_hpoly()
        .coeffs()
        .iter()
        .filter_map(|c| hbar_expand(c).map(|(o, _)| o))
        .min()
        .unwrap_or(i64::MAX);
    report.push("quantum K = O(hbar^4), so lim K = 0", k_order >= 4, 0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    fn cp() -> ClassicalParams {
        ClassicalParams::from_ratios(1, 1, 1, 1).unwrap()
    }

    #[test]
    fn l_c_is_py_squared() {
        let l = classical_object(OperatorName::L, &cp()).unwrap();
        assert_eq!(l, PhaseSpacePolynomial::term(RingElement::one(), 0, 2));
    }

    #[test]
    fn bracket_basics() {
        let f = PhaseSpacePolynomial::function(RingElement::term(1, 1, 1, 0));
        let g = PhaseSpacePolynomial::function(RingElement::term(0, 2, 0, 1));
        assert!(poisson_bracket(&f, &g).is_zero());
        let r = classical_object(OperatorName::R, &cp()).unwrap();
        assert!(poisson_bracket(&r, &r).is_zero());
        // {X-function, P_X} = ∂_X f
        let px = PhaseSpacePolynomial::px();
        assert_eq!(poisson_bracket(&f, &px), f.diff_pos(Axis::X));
    }

    #[test]
    fn r_c_potential_part_is_nonnegative() {
        let r = classical_object(OperatorName::R, &cp()).unwrap();
        for (x, y) in [(0.3, 0.2), (1.5, -1.0), (0.7, 1.4)] {
            let v = r.evaluate(x, y, 0.0, 0.0, 1.0, 1.0).unwrap();
            let expected = y.sin().powi(2) / x.sinh().powi(2);
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_c_value() {
        let co = ClassicalCoefficients::published().fix_k(&rat_int(2));
        assert_eq!(co.epsilon.coeff(0).eval(&rat_int(1), &rat_int(2)), rat_int(-64));
    }

    #[test]
    fn hbar_power_counting() {
        // 16 q⁴ (k − 1)(k + 1) = 16ħ²Q⁴Kc² − 16ħ⁴Q⁴
        let eps = Poly::int(16) * Poly::q_pow(4) * (Poly::k() * Poly::k() - Poly::one());
        let (order, part) = hbar_expand(&eps).unwrap();
        assert_eq!(order, 2);
        assert_eq!(part, Poly::int(16) * Poly::q_pow(4) * Poly::k() * Poly::k());
    }

    #[test]
    fn full_suite_passes() {
        for p in [cp(), ClassicalParams::from_ratios(3, 2, 5, 2).unwrap()] {
            let r = classical_algebra_check(&p).unwrap();
            let bad: Vec<_> = r.failures().map(|e| e.identity.clone()).collect();
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn flipped_epsilon_breaks_casimir() {
        let p = cp();
        let g = ClassicalGenerators::new(&p).unwrap();
        let mut co = ClassicalCoefficients::published().fix_k(&p.kc);
        assert!(classical_casimir(&g, &co).is_zero());
        co.epsilon = co.epsilon.scale(&-Poly::one());
        assert!(!classical_casimir(&g, &co).is_zero());
    }
}
