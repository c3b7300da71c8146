//! The Hamiltonian on the layer, its integrals of motion, the intertwining
//! operators and the closed-form spectrum.
//!
//! Units are `ħ = 2m₀ = 1` and the additive constant of the effective
//! potential is zero. Operators are built with `q` symbolic; `k` is either
//! symbolic ([`build_operator_generic`]) or fixed by [`ModelParams`].

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{fmt_rational, rat_int, Poly};
use crate::symkernel::{op_equals, DiffOperator, NumericOracle, RingElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub q: BigRational,
    pub k: BigRational,
}

impl ModelParams {
    pub fn new(q: BigRational, k: BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidParams(format!("q must be positive, got {}", fmt_rational(&q))));
        }
        if !k.is_positive() {
            return Err(Error::InvalidParams(format!("k must be positive, got {}", fmt_rational(&k))));
        }
        Ok(Self { q, k })
    }

    /// Convenience constructor from `q = qn/qd`, `k = kn/kd`.
    pub fn from_ratios(qn: i64, qd: i64, kn: i64, kd: i64) -> Result<Self> {
        Self::new(crate::poly::rat(qn, qd), crate::poly::rat(kn, kd))
    }

    pub fn q_f64(&self) -> f64 {
        crate::poly::rat_to_f64(&self.q)
    }

    pub fn k_f64(&self) -> f64 {
        crate::poly::rat_to_f64(&self.k)
    }

    /// The same model with `k -> k + 1`.
    pub fn shifted(&self) -> Self {
        Self { q: self.q.clone(), k: &self.k + BigRational::one() }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}, k={}", fmt_rational(&self.q), fmt_rational(&self.k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OperatorName {
    H,
    H1,
    L,
    R,
    Rbar,
    Eta,
    EtaDag,
    EtaBar,
    EtaBarDag,
    Dy,
    Xi,
    XiBar,
    MassInv,
    Veff,
}

impl OperatorName {
    pub const ALL: [OperatorName; 14] = [
        OperatorName::H,
        OperatorName::H1,
        OperatorName::L,
        OperatorName::R,
        OperatorName::Rbar,
        OperatorName::Eta,
        OperatorName::EtaDag,
        OperatorName::EtaBar,
        OperatorName::EtaBarDag,
        OperatorName::Dy,
        OperatorName::Xi,
        OperatorName::XiBar,
        OperatorName::MassInv,
        OperatorName::Veff,
    ];

    /// Name used on the command line (`--op eta_bar_dag`).
    pub fn cli_name(&self) -> &'static str {
        match self {
            OperatorName::H => "H",
            OperatorName::H1 => "H1",
            OperatorName::L => "L",
            OperatorName::R => "R",
            OperatorName::Rbar => "Rbar",
            OperatorName::Eta => "eta",
            OperatorName::EtaDag => "eta_dag",
            OperatorName::EtaBar => "eta_bar",
            OperatorName::EtaBarDag => "eta_bar_dag",
            OperatorName::Dy => "Dy",
            OperatorName::Xi => "xi",
            OperatorName::XiBar => "xi_bar",
            OperatorName::MassInv => "mass_inv",
            OperatorName::Veff => "Veff",
        }
    }
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for OperatorName {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        OperatorName::ALL
            .iter()
            .find(|op| op.cli_name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

/// Deliberate single-sign defects used as controls for the verification suites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// Flips the sign of the `sinh qx sin qy ∂_y` term of `η̄`.
    EtaBarSign,
    /// Flips the sign of the constant `k₀` of the Casimir polynomial.
    CasimirConstant,
    /// Flips the sign of the constant `1` in `2k² + 2k + 1` of the `σ_ν` formula.
    SigmaCoefficient,
}

impl FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Mutation::None),
            "eta-bar-sign" => Ok(Mutation::EtaBarSign),
            "casimir-constant" => Ok(Mutation::CasimirConstant),
            "sigma-coefficient" => Ok(Mutation::SigmaCoefficient),
            _ => Err(format!("unknown mutation `{s}` (none, eta-bar-sign, casimir-constant, sigma-coefficient)")),
        }
    }
}

fn term(a: i64, b: i64, m: u32, d: u32) -> RingElement {
    RingElement::term(a, b, m, d)
}

fn op(f: RingElement, i: u32, j: u32) -> DiffOperator {
    DiffOperator::term(f, i, j)
}

fn mult(f: RingElement) -> DiffOperator {
    DiffOperator::multiplication(f)
}

fn q() -> Poly {
    Poly::q()
}

fn k() -> Poly {
    Poly::k()
}

fn q2() -> Poly {
    Poly::q_pow(2)
}

/// `1/M(x) = cosh² qx`.
fn mass_inv() -> RingElement {
    term(0, 2, 0, 0)
}

fn veff() -> RingElement {
    // -q² cosh² + q² k(k-1) csch²
    let kk = k() * (k() - Poly::one());
    &term(0, 2, 0, 0).scale(&-q2()) + &term(-2, 0, 0, 0).scale(&(q2() * kk))
}

fn hamiltonian() -> Result<DiffOperator> {
    let m = mult(mass_inv());
    let kin_x = DiffOperator::dx().compose(&m)?.compose(&DiffOperator::dx())?;
    let kin_y = DiffOperator::dy().compose(&m)?.compose(&DiffOperator::dy())?;
    Ok(&(-(&kin_x + &kin_y)) + &mult(veff()))
}

/// `η = cosh sin ∂x − sinh cos ∂y + q sinh sin − qk csch sin` (sign `±` selects `η†`).
fn eta(dagger: bool) -> DiffOperator {
    let sgn = if dagger { -Poly::one() } else { Poly::one() };
    let qk = q() * k();
    let parts = [
        op(term(0, 1, 1, 0).scale(&sgn), 1, 0),
        op(term(1, 0, 0, 1).scale(&-sgn.clone()), 0, 1),
        mult(term(1, 0, 1, 0).scale(&(&sgn * &q()))),
        mult(term(-1, 0, 1, 0).scale(&-qk)),
    ];
    parts.iter().fold(DiffOperator::zero(), |acc, p| &acc + p)
}

/// `η̄ = cosh cos ∂x + sinh sin ∂y + q sinh cos − qk csch cos` (and `η̄†`).
fn eta_bar(dagger: bool, mutation: Mutation) -> DiffOperator {
    let sgn = if dagger { -Poly::one() } else { Poly::one() };
    let dy_sign = if mutation == Mutation::EtaBarSign && !dagger { -sgn.clone() } else { sgn.clone() };
    let qk = q() * k();
    let parts = [
        op(term(0, 1, 0, 1).scale(&sgn), 1, 0),
        op(term(1, 0, 1, 0).scale(&dy_sign), 0, 1),
        mult(term(1, 0, 0, 1).scale(&(&sgn * &q()))),
        mult(term(-1, 0, 0, 1).scale(&-qk)),
    ];
    parts.iter().fold(DiffOperator::zero(), |acc, p| &acc + p)
}

/// The displayed second-order form of `R` (`bar = false`) or `R̄` (`bar = true`).
fn r_operator(bar: bool) -> DiffOperator {
    // For R̄ the roles of sin qy and cos qy swap and the odd-in-y terms flip sign.
    let (sy2, cy2) = if bar { (term(0, 0, 0, 2), term(0, 0, 2, 0)) } else { (term(0, 0, 2, 0), term(0, 0, 0, 2)) };
    let flip = if bar { -Poly::one() } else { Poly::one() };
    let sc = term(0, 0, 1, 1);
    let one = RingElement::one();
    let s2 = term(2, 0, 0, 0);
    let c2 = term(0, 2, 0, 0);
    let csch2 = term(-2, 0, 0, 0);
    let sinh_cosh = term(1, 1, 0, 0);

    let dxx = op(c2.mul(&sy2).scale(&-Poly::one()), 2, 0);
    let dxy = op(sinh_cosh.mul(&sc).scale(&(Poly::int(2) * flip.clone())), 1, 1);
    let dyy = op(s2.mul(&cy2).scale(&-Poly::one()), 0, 2);
    let dx1 = op(sinh_cosh.mul(&(&one - &sy2.scale(&Poly::int(4)))).scale(&q()), 1, 0);
    let dy1 = op((&one + &s2.scale(&Poly::int(4))).mul(&sc).scale(&(q() * flip)), 0, 1);
    let c0 = &(&s2 - &sy2) - &s2.mul(&sy2).scale(&Poly::int(3));
    let c1 = &one + &csch2.mul(&sy2);
    let c2k = csch2.mul(&sy2);
    let zero_order = &(&c0.scale(&q2()) - &c1.scale(&(q2() * k()))) + &c2k.scale(&(q2() * k() * k()));
    [dxx, dxy, dyy, dx1, dy1, mult(zero_order)].iter().fold(DiffOperator::zero(), |acc, p| &acc + p)
}

/// Builds an operator with symbolic `q` and `k`.
pub fn build_operator_generic(name: OperatorName) -> Result<DiffOperator> {
    build_operator_generic_with(name, Mutation::None)
}

pub fn build_operator_generic_with(name: OperatorName, mutation: Mutation) -> Result<DiffOperator> {
    Ok(match name {
        OperatorName::H => hamiltonian()?,
        OperatorName::H1 => {
            let shifted = hamiltonian()?.shift_k(&BigRational::one());
            &shifted + &DiffOperator::constant(Poly::int(2) * q2() * k())
        }
        OperatorName::L => op(RingElement::constant(-Poly::one()), 0, 2),
        OperatorName::R => r_operator(false),
        OperatorName::Rbar => r_operator(true),
        OperatorName::Eta => eta(false),
        OperatorName::EtaDag => eta(true),
        OperatorName::EtaBar => eta_bar(false, mutation),
        OperatorName::EtaBarDag => eta_bar(true, mutation),
        OperatorName::Dy => DiffOperator::dy(),
        OperatorName::Xi => mult(term(-1, 0, 1, 0)),
        OperatorName::XiBar => mult(term(-1, 0, 0, 1)),
        OperatorName::MassInv => mult(mass_inv()),
        OperatorName::Veff => mult(veff()),
    })
}

/// Builds an operator with `k` fixed to `p.k`; `q` stays symbolic because
/// every operator is homogeneous in it.
pub fn build_operator(name: OperatorName, p: &ModelParams) -> Result<DiffOperator> {
    build_operator_with(name, p, Mutation::None)
}

pub fn build_operator_with(name: OperatorName, p: &ModelParams, mutation: Mutation) -> Result<DiffOperator> {
    Ok(build_operator_generic_with(name, mutation)?.fix_k(&p.k))
}

/// `E_N = q² (N + 2)(N + 2k + 1)`.
pub fn energy(level: u32, p: &ModelParams) -> BigRational {
    energy_poly(level).eval(&p.q, &p.k)
}

pub fn energy_poly(level: u32) -> Poly {
    let n = level as i64;
    q2() * Poly::int(n + 2) * (Poly::int(n + 1) + Poly::int(2) * k())
}

/// `[N/2] + 1`.
pub fn degeneracy(level: u32) -> u32 {
    level / 2 + 1
}

/// `r_ν = q² ν (ν + 2k)`.
pub fn r_eigenvalue(nu: u32, p: &ModelParams) -> BigRational {
    let nu_r = rat_int(nu as i64);
    &p.q * &p.q * &nu_r * (&nu_r + rat_int(2) * &p.k)
}

/// `L` eigenvalue `(l + 1)² q²` of the first-basis member with quantum number `l`.
pub fn l_eigenvalue(l: u32, p: &ModelParams) -> BigRational {
    let v = rat_int(l as i64 + 1);
    &p.q * &p.q * &v * &v
}

/// Checks `H = L + R + R̄ + (2q²k + extra)·1`. `extra = 0` is the true identity.
pub fn sum_rule_check_with(p: &ModelParams, extra: &BigRational) -> Result<bool> {
    let h = build_operator(OperatorName::H, p)?;
    let l = build_operator(OperatorName::L, p)?;
    let r = build_operator(OperatorName::R, p)?;
    let rb = build_operator(OperatorName::Rbar, p)?;
    let shift = (Poly::int(2) * q2() * Poly::constant(p.k.clone())) + Poly::constant(extra.clone());
    let rhs = &(&(&l + &r) + &rb) + &DiffOperator::constant(shift);
    Ok(op_equals(&h, &rhs, &NumericOracle::default())?.equal)
}

pub fn sum_rule_check(p: &ModelParams) -> Result<bool> {
    sum_rule_check_with(p, &BigRational::zero())
}
