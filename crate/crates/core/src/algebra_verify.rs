//! Machine verification of the operator identities of the model and of the
//! quadratic associative algebra generated by `A = R`, `B = L` and
//! `C = [A, B]`, including its Casimir.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_operator_with, ModelParams, Mutation, OperatorName};
use crate::poly::{rat, Poly};
use crate::report::VerificationReport;
use crate::symkernel::{op_equals, DiffOperator, NumericOracle};

/// A polynomial in `H` with `(q, k)`-polynomial coefficients, ascending powers.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct HPoly {
    coeffs: Vec<Poly>,
}

impl HPoly {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Poly) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 H`.
    pub fn linear(c0: Poly, c1: Poly) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Degree in `H`; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Poly) -> HPoly {
        HPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &HPoly) -> HPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        HPoly::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &HPoly) -> HPoly {
        self.add(&other.scale(&-Poly::one()))
    }

    pub fn mul(&self, other: &HPoly) -> HPoly {
        if self.is_zero() || other.is_zero() {
            return HPoly::zero();
        }
        let mut out = vec![Poly::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        HPoly::new(out)
    }

    pub fn fix_k(&self, k: &BigRational) -> HPoly {
        HPoly::new(self.coeffs.iter().map(|c| c.fix_k(k)).collect())
    }

    /// Value at `H = e` where `e` is itself a `(q, k)` polynomial.
    pub fn eval_poly(&self, e: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| &(&acc * e) + c)
    }

    pub fn eval(&self, q: &BigRational, k: &BigRational, e: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * e + c.eval(q, k))
    }

    /// Substitutes the operator `H`.
    pub fn to_operator(&self, powers: &mut HPowers) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &powers.get(i as u32)?.scale(c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*H"),
                _ => format!("({c})*H^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HPoly({self})")
    }
}

/// Lazily computed powers `H^n`.
pub struct HPowers {
    pows: Vec<DiffOperator>,
}

impl HPowers {
    pub fn new(h: DiffOperator) -> Self {
        Self { pows: vec![DiffOperator::identity(), h] }
    }

    pub fn get(&mut self, n: u32) -> Result<&DiffOperator> {
        while self.pows.len() <= n as usize {
            let next = self.pows.last().unwrap().compose(&self.pows[1])?;
            self.pows.push(next);
        }
        Ok(&self.pows[n as usize])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraCoefficients {
    pub alpha: Poly,
    pub gamma: Poly,
    pub a: Poly,
    pub delta: HPoly,
    pub epsilon: HPoly,
    pub zeta: HPoly,
    pub d: HPoly,
    pub z: HPoly,
}

impl AlgebraCoefficients {
    /// The coefficient set of this model with symbolic `k`.
    pub fn published() -> Self {
        let q2 = || Poly::q_pow(2);
        let q4 = || Poly::q_pow(4);
        let k = Poly::k;
        let one = Poly::one;
        let two_q2k = q2() * Poly::int(2) * k();
        let p8q2 = Poly::int(8) * q2();
        let p8q4 = Poly::int(8) * q4();
        Self {
            alpha: p8q2.clone(),
            gamma: p8q2.clone(),
            a: Poly::zero(),
            delta: HPoly::linear(&p8q2 * &(q2() * (Poly::int(2) * k() - one())), -p8q2.clone()),
            epsilon: HPoly::constant(Poly::int(16) * q4() * (k() - one()) * (k() + one())),
            zeta: HPoly::linear(&p8q4 * &(k() - one()) * two_q2k.clone(), -(&p8q4 * &(k() - one()))),
            d: HPoly::constant(Poly::int(16) * q4()),
            z: HPoly::linear(&p8q4 * &two_q2k, -p8q4.clone()),
        }
    }

    pub fn fix_k(&self, k: &BigRational) -> Self {
        Self {
            alpha: self.alpha.fix_k(k),
            gamma: self.gamma.fix_k(k),
            a: self.a.fix_k(k),
            delta: self.delta.fix_k(k),
            epsilon: self.epsilon.fix_k(k),
            zeta: self.zeta.fix_k(k),
            d: self.d.fix_k(k),
            z: self.z.fix_k(k),
        }
    }

    pub fn at(p: &ModelParams) -> Self {
        Self::published().fix_k(&p.k)
    }

    /// Numeric view of a coefficient at `(q, k)` and energy `e`.
    pub fn eval_all(&self, q: &BigRational, k: &BigRational, e: &BigRational) -> [BigRational; 8] {
        [
            self.alpha.eval(q, k),
            self.gamma.eval(q, k),
            self.a.eval(q, k),
            self.delta.eval(q, k, e),
            self.epsilon.eval(q, k, e),
            self.zeta.eval(q, k, e),
            self.d.eval(q, k, e),
            self.z.eval(q, k, e),
        ]
    }

    /// Multipliers of each monomial of the sixth-order Casimir formula.
    pub fn casimir_terms(&self) -> CasimirTerms {
        let c = |x: &Poly| HPoly::constant(x.clone());
        let third = |h: &HPoly| h.scale(&Poly::constant(rat(1, 3)));
        let two_thirds = |h: &HPoly| h.scale(&Poly::constant(rat(2, 3)));
        let (al, ga, a) = (c(&self.alpha), c(&self.gamma), c(&self.a));
        CasimirTerms {
            a3: two_thirds(&a),
            aab: third(&al).scale(&-Poly::one()),
            abb: third(&ga).scale(&-Poly::one()),
            a2: two_thirds(&al.mul(&al)).add(&self.d).add(&two_thirds(&a.mul(&ga))),
            ab: third(&al.mul(&ga)).sub(&self.delta),
            b2: two_thirds(&ga.mul(&ga)).sub(&self.epsilon),
            a1: two_thirds(&al.mul(&self.delta))
                .add(&third(&a.mul(&self.epsilon)))
                .add(&third(&self.d.mul(&ga)))
                .add(&self.z.scale(&Poly::int(2))),
            b1: third(&al.mul(&self.epsilon))
                .scale(&-Poly::one())
                .add(&two_thirds(&ga.mul(&self.delta)))
                .sub(&self.zeta.scale(&Poly::int(2))),
            one: third(&ga.mul(&self.z)).sub(&third(&al.mul(&self.zeta))),
        }
    }
}

/// The `H`-polynomial multipliers of each monomial in the Casimir formula.
#[derive(Clone, Debug)]
pub struct CasimirTerms {
    pub a3: HPoly,
    pub aab: HPoly,
    pub abb: HPoly,
    pub a2: HPoly,
    pub ab: HPoly,
    pub b2: HPoly,
    pub a1: HPoly,
    pub b1: HPoly,
    pub one: HPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CasimirPolynomial {
    #[serde(serialize_with = "ser_poly")]
    pub k0: Poly,
    #[serde(serialize_with = "ser_poly")]
    pub k1: Poly,
    #[serde(serialize_with = "ser_poly")]
    pub k2: Poly,
    #[serde(serialize_with = "ser_poly")]
    pub k3: Poly,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl CasimirPolynomial {
    /// Expansion of `K = −4q⁴ [2q²(7k − 6) − 3H] (2q²k − H)`.
    pub fn expected() -> Self {
        let q2 = Poly::q_pow(2);
        let k = Poly::k();
        let left = HPoly::linear(Poly::int(2) * q2.clone() * (Poly::int(7) * k.clone() - Poly::int(6)), Poly::int(-3));
        let right = HPoly::linear(Poly::int(2) * q2 * k, Poly::int(-1));
        let prod = left.mul(&right).scale(&(Poly::int(-4) * Poly::q_pow(4)));
        Self::from_hpoly(&prod)
    }

    pub fn from_hpoly(h: &HPoly) -> Self {
        Self { k0: h.coeff(0), k1: h.coeff(1), k2: h.coeff(2), k3: h.coeff(3) }
    }

    pub fn as_hpoly(&self) -> HPoly {
        HPoly::new(vec![self.k0.clone(), self.k1.clone(), self.k2.clone(), self.k3.clone()])
    }

    pub fn fix_k(&self, k: &BigRational) -> Self {
        Self { k0: self.k0.fix_k(k), k1: self.k1.fix_k(k), k2: self.k2.fix_k(k), k3: self.k3.fix_k(k) }
    }

    pub fn eval(&self, q: &BigRational, k: &BigRational) -> [BigRational; 4] {
        [self.k0.eval(q, k), self.k1.eval(q, k), self.k2.eval(q, k), self.k3.eval(q, k)]
    }

    /// Value on the energy level `e`.
    pub fn value_at(&self, q: &BigRational, k: &BigRational, e: &BigRational) -> BigRational {
        self.as_hpoly().eval(q, k, e)
    }
}

/// The operators of the algebra at fixed `k` (with `q` symbolic).
pub struct Generators {
    pub a: DiffOperator,
    pub b: DiffOperator,
    pub h: DiffOperator,
    pub mutation: Mutation,
    pub params: ModelParams,
}

impl Generators {
    pub fn new(p: &ModelParams, mutation: Mutation) -> Result<Self> {
        Ok(Self {
            a: build_operator_with(OperatorName::R, p, mutation)?,
            b: build_operator_with(OperatorName::L, p, mutation)?,
            h: build_operator_with(OperatorName::H, p, mutation)?,
            mutation,
            params: p.clone(),
        })
    }

    fn op(&self, name: OperatorName) -> Result<DiffOperator> {
        build_operator_with(name, &self.params, self.mutation)
    }
}

fn check(report: &mut VerificationReport, identity: &str, lhs: &DiffOperator, rhs: &DiffOperator) -> Result<bool> {
    let eq = op_equals(lhs, rhs, &NumericOracle::default())?;
    report.push(identity, eq.equal, eq.residual_terms);
    if !eq.equal {
        report.annotate_last(residual_dump(&(lhs - rhs)));
    }
    Ok(eq.equal)
}

/// First lines of a residual dump; enough to locate a sign error.
fn residual_dump(residual: &DiffOperator) -> String {
    residual.dump().lines().take(12).collect::<Vec<_>>().join("\n")
}

type Check<'a> = Box<dyn Fn() -> Result<(DiffOperator, DiffOperator)> + Send + Sync + 'a>;

/// Runs independent identity checks in parallel and assembles the report in order.
fn run_checks(checks: Vec<(String, Check<'_>)>) -> Result<VerificationReport> {
    let results: Vec<Result<(String, DiffOperator, DiffOperator)>> =
        checks.par_iter().map(|(name, f)| f().map(|(l, r)| (name.clone(), l, r))).collect();
    let mut report = VerificationReport::new();
    for r in results {
        let (name, l, r) = r?;
        check(&mut report, &name, &l, &r)?;
    }
    Ok(report)
}

/// The first-order operator algebra of `∂_y, η, η̄, η†, η̄†` (six relations
/// and their four independent Hermitian conjugates).
pub fn first_order_algebra_check(p: &ModelParams) -> Result<VerificationReport> {
    first_order_algebra_check_with(p, Mutation::None)
}

pub fn first_order_algebra_check_with(p: &ModelParams, mutation: Mutation) -> Result<VerificationReport> {
    use OperatorName::*;
    let get = |n| build_operator_with(n, p, mutation);
    let (dy, eta, etad, etab, etabd, xi, xib) =
        (get(Dy)?, get(Eta)?, get(EtaDag)?, get(EtaBar)?, get(EtaBarDag)?, get(Xi)?, get(XiBar)?);
    let q = Poly::q();
    let two_q2k = Poly::int(2) * Poly::q_pow(2) * Poly::constant(p.k.clone());
    let one = DiffOperator::identity();

    let xi2 = xi.compose(&xi)?;
    let xib2 = xib.compose(&xib)?;
    let xixib = xi.compose(&xib)?;
    let rel: Vec<(&str, &DiffOperator, &DiffOperator, DiffOperator)> = vec![
        ("[Dy, eta] = q eta_bar", &dy, &eta, etab.scale(&q)),
        ("[Dy, eta_bar] = -q eta", &dy, &etab, eta.scale(&-q.clone())),
        ("[eta, eta_bar] = q Dy", &eta, &etab, dy.scale(&q)),
        ("[eta, eta_dag] = 2q^2k (1 + xi^2)", &eta, &etad, (&one + &xi2).scale(&two_q2k)),
        ("[eta_bar, eta_bar_dag] = 2q^2k (1 + xi_bar^2)", &etab, &etabd, (&one + &xib2).scale(&two_q2k)),
        ("[eta, eta_bar_dag] = -q Dy + 2q^2k xi xi_bar", &eta, &etabd, &dy.scale(&-q.clone()) + &xixib.scale(&two_q2k)),
        ("[Dy, eta_dag] = q eta_bar_dag", &dy, &etad, etabd.scale(&q)),
        ("[Dy, eta_bar_dag] = -q eta_dag", &dy, &etabd, etad.scale(&-q.clone())),
        ("[eta_dag, eta_bar_dag] = q Dy", &etad, &etabd, dy.scale(&q)),
        ("[eta_bar, eta_dag] = q Dy + 2q^2k xi xi_bar", &etab, &etad, &dy.scale(&q) + &xixib.scale(&two_q2k)),
    ];
    let checks: Vec<(String, Check<'_>)> = rel
        .into_iter()
        .map(|(name, x, y, rhs)| {
            let f: Check<'_> = Box::new(move || Ok((x.commutator(y)?, rhs.clone())));
            (name.to_string(), f)
        })
        .collect();
    run_checks(checks)
}

/// `C = q {∂_y, η†η̄ + η̄†η}`.
pub fn compute_c(p: &ModelParams) -> Result<DiffOperator> {
    compute_c_with(p, Mutation::None)
}

pub fn compute_c_with(p: &ModelParams, mutation: Mutation) -> Result<DiffOperator> {
    use OperatorName::*;
    let get = |n| build_operator_with(n, p, mutation);
    let inner = &get(EtaDag)?.compose(&get(EtaBar)?)? + &get(EtaBarDag)?.compose(&get(Eta)?)?;
    Ok(get(Dy)?.anticommutator(&inner)?.scale(&Poly::q()))
}

/// Every operator identity of the model: commuting integrals, both
/// intertwinings, the factorizations of `R` and `R̄`, the sum rule, the two
/// forms of `C`, the Hermitian-conjugate pairs and the definitions of `ξ, ξ̄`.
pub fn operator_identity_check(p: &ModelParams) -> Result<VerificationReport> {
    operator_identity_check_with(p, Mutation::None)
}

pub fn operator_identity_check_with(p: &ModelParams, mutation: Mutation) -> Result<VerificationReport> {
    use OperatorName::*;
    let g = Generators::new(p, mutation)?;
    let get = |n| g.op(n);
    let (h, l, r, rb, h1) = (g.h.clone(), g.b.clone(), g.a.clone(), get(Rbar)?, get(H1)?);
    let (eta, etad, etab, etabd, dy, xi, xib) =
        (get(Eta)?, get(EtaDag)?, get(EtaBar)?, get(EtaBarDag)?, get(Dy)?, get(Xi)?, get(XiBar)?);
    let zero = DiffOperator::zero();
    let two_q2k = Poly::int(2) * Poly::q_pow(2) * Poly::constant(p.k.clone());
    let minus_inv_2qk = Poly::constant(-(BigRational::one() / (BigRational::from_integer(2.into()) * &p.k)));

    let mut checks: Vec<(String, Check<'_>)> = Vec::new();
    macro_rules! add {
        ($name:expr, $body:expr) => {
            checks.push(($name.to_string(), Box::new(move || $body)));
        };
    }
    let (h_, l_, r_, rb_) = (&h, &l, &r, &rb);
    let zero_ = &zero;
    add!("[H, L] = 0", Ok((h_.commutator(l_)?, zero_.clone())));
    add!("[H, R] = 0", Ok((h_.commutator(r_)?, zero_.clone())));
    add!("[H, Rbar] = 0", Ok((h_.commutator(rb_)?, zero_.clone())));
    let (eta_, etab_, h1_) = (&eta, &etab, &h1);
    add!("eta H = H1 eta", Ok((eta_.compose(h_)?, h1_.compose(eta_)?)));
    add!("eta_bar H = H1 eta_bar", Ok((etab_.compose(h_)?, h1_.compose(etab_)?)));
    let (etad_, etabd_) = (&etad, &etabd);
    add!("R = eta_dag eta", Ok((r_.clone(), etad_.compose(eta_)?)));
    add!("Rbar = eta_bar_dag eta_bar", Ok((rb_.clone(), etabd_.compose(etab_)?)));
    let shift = two_q2k.clone();
    add!("H = L + R + Rbar + 2q^2k", Ok((h_.clone(), &(&(l_ + r_) + rb_) + &DiffOperator::constant(shift.clone()))));
    add!(
        "C = [R, L] = q{Dy, eta_dag eta_bar + eta_bar_dag eta}",
        Ok((compute_c_with(p, mutation)?, r_.commutator(l_)?))
    );
    add!("eta_dag = adjoint(eta)", Ok((etad_.clone(), eta_.adjoint()?)));
    add!("eta_bar_dag = adjoint(eta_bar)", Ok((etabd_.clone(), etab_.adjoint()?)));
    add!("H = adjoint(H)", Ok((h_.adjoint()?, h_.clone())));
    add!("R = adjoint(R)", Ok((r_.adjoint()?, r_.clone())));
    let (xi_, xib_, dy_) = (&xi, &xib, &dy);
    let m1 = minus_inv_2qk.clone();
    add!("xi = -(2qk)^-1 (eta + eta_dag)", Ok((xi_.scale(&Poly::q()), (eta_ + etad_).scale(&m1))));
    let m2 = minus_inv_2qk.clone();
    add!("xi_bar = -(2qk)^-1 (eta_bar + eta_bar_dag)", Ok((xib_.scale(&Poly::q()), (etab_ + etabd_).scale(&m2))));
    add!("[Dy, L] = 0", Ok((dy_.commutator(l_)?, zero_.clone())));

    let mut report = run_checks(checks)?;
    // Non-commutation of the two basic integrals.
    let lr = l.commutator(&r)?;
    report.push("[L, R] != 0", !lr.is_zero(), lr.term_count());
    Ok(report)
}

/// Operators built from `A`, `B`, `C` that appear on the right-hand sides.
struct Products {
    a2: DiffOperator,
    ab_anti: DiffOperator,
    b2: DiffOperator,
}

fn products(g: &Generators) -> Result<Products> {
    Ok(Products { a2: g.a.compose(&g.a)?, ab_anti: g.a.anticommutator(&g.b)?, b2: g.b.compose(&g.b)? })
}

/// Right-hand sides of `[A, C]` and `[B, C]` for a coefficient set.
fn quadratic_rhs(
    g: &Generators,
    pr: &Products,
    co: &AlgebraCoefficients,
    hp: &mut HPowers,
) -> Result<(DiffOperator, DiffOperator)> {
    let delta = co.delta.to_operator(hp)?;
    let epsilon = co.epsilon.to_operator(hp)?;
    let zeta = co.zeta.to_operator(hp)?;
    let d = co.d.to_operator(hp)?;
    let z = co.z.to_operator(hp)?;
    let ac = &(&(&(&pr.a2.scale(&co.alpha) + &pr.ab_anti.scale(&co.gamma)) + &delta.compose(&g.a)?)
        + &epsilon.compose(&g.b)?)
        + &zeta;
    let bc = &(&(&(&(&pr.a2.scale(&co.a) - &pr.b2.scale(&co.gamma)) - &pr.ab_anti.scale(&co.alpha))
        + &d.compose(&g.a)?)
        - &delta.compose(&g.b)?)
        + &z;
    Ok((ac, bc))
}

/// Both quadratic relations with the model's coefficient set. Returns the
/// coefficients when both residuals vanish identically.
pub fn quadratic_algebra_check(p: &ModelParams) -> Result<AlgebraCoefficients> {
    quadratic_algebra_check_with(p, Mutation::None).map(|(co, _)| co)
}

/// As [`quadratic_algebra_check`], also returning the per-identity report
/// (including the Jacobi identity). Fails with the first nonzero residual.
pub fn quadratic_algebra_check_with(
    p: &ModelParams,
    mutation: Mutation,
) -> Result<(AlgebraCoefficients, VerificationReport)> {
    let g = Generators::new(p, mutation)?;
    let c = compute_c_with(p, mutation)?;
    let co = AlgebraCoefficients::at(p);
    let (lhs, rhs) = rayon::join(
        || -> Result<_> { Ok((g.a.commutator(&c)?, g.b.commutator(&c)?)) },
        || -> Result<_> {
            let pr = products(&g)?;
            let mut hp = HPowers::new(g.h.clone());
            let rhs = quadratic_rhs(&g, &pr, &co, &mut hp)?;
            Ok((pr, rhs))
        },
    );
    let (ac, bc) = lhs?;
    let (_, (rhs_ac, rhs_bc)) = rhs?;
    let mut report = VerificationReport::new();
    let names = [
        "[A, C] = alpha A^2 + gamma {A,B} + delta A + epsilon B + zeta",
        "[B, C] = a A^2 - gamma B^2 - alpha {A,B} + d A - delta B + z",
    ];
    for (name, lhs, rhs) in [(names[0], &ac, &rhs_ac), (names[1], &bc, &rhs_bc)] {
        if !check(&mut report, name, lhs, rhs)? {
            let residual = lhs - rhs;
            return Err(Error::ResidualNonzero {
                identity: name.into(),
                terms: residual.term_count(),
                dump: residual_dump(&residual),
            });
        }
    }
    report.push("a = 0", co.a.is_zero(), 0);
    let jacobi = &g.a.commutator(&bc)? - &g.b.commutator(&ac)?;
    report.push("[A, [B, C]] = [B, [A, C]]", jacobi.is_zero(), jacobi.term_count());
    if !jacobi.is_zero() {
        report.annotate_last(residual_dump(&jacobi));
    }
    Ok((co, report))
}

/// `{X, Y, Z}` summed over all six orderings.
fn sym3(x: &DiffOperator, y: &DiffOperator, z: &DiffOperator) -> Result<DiffOperator> {
    let perms = [(x, y, z), (x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
    let parts: Vec<DiffOperator> = perms.par_iter().map(|(a, b, c)| a.compose(b)?.compose(c)).collect::<Result<_>>()?;
    Ok(parts.iter().fold(DiffOperator::zero(), |acc, t| &acc + t))
}

/// Builds `K` from the sixth-order formula with operator `A, B, C, H`.
pub fn casimir_operator(p: &ModelParams, co: &AlgebraCoefficients, mutation: Mutation) -> Result<DiffOperator> {
    let g = Generators::new(p, mutation)?;
    let c = compute_c_with(p, mutation)?;
    let t = co.casimir_terms();
    let pr = products(&g)?;
    let mut hp = HPowers::new(g.h.clone());
    hp.get(2)?;
    let (c2, (aab, abb)) =
        rayon::join(|| c.compose(&c), || rayon::join(|| sym3(&g.a, &g.a, &g.b), || sym3(&g.a, &g.b, &g.b)));
    let mut k = c2?;
    let a3 = if t.a3.is_zero() { DiffOperator::zero() } else { pr.a2.compose(&g.a)? };
    let pieces: [(&HPoly, &DiffOperator); 6] =
        [(&t.a3, &a3), (&t.a2, &pr.a2), (&t.ab, &pr.ab_anti), (&t.b2, &pr.b2), (&t.a1, &g.a), (&t.b1, &g.b)];
    for (coef, op) in pieces {
        if !coef.is_zero() {
            k = &k + &coef.to_operator(&mut hp)?.compose(op)?;
        }
    }
    for (coef, op) in [(&t.aab, aab?), (&t.abb, abb?)] {
        // These multipliers are constants for this model; fall back to H-composition otherwise.
        k = &k + &coef.to_operator(&mut hp)?.compose(&op)?;
    }
    k = &k + &t.one.to_operator(&mut hp)?;
    Ok(k)
}

/// Builds `K` and checks it equals `k₀ + k₁H + k₂H²` with the expected
/// coefficients; returns them on success.
pub fn casimir_check(p: &ModelParams) -> Result<CasimirPolynomial> {
    casimir_check_with(p, Mutation::None)
}

pub fn casimir_check_with(p: &ModelParams, mutation: Mutation) -> Result<CasimirPolynomial> {
    let co = AlgebraCoefficients::at(p);
    let k_op = casimir_operator(p, &co, mutation)?;
    let mut expected = CasimirPolynomial::expected().fix_k(&p.k);
    if mutation == Mutation::CasimirConstant {
        expected.k0 = -expected.k0;
    }
    let h = build_operator_with(OperatorName::H, p, mutation)?;
    let mut hp = HPowers::new(h);
    let rhs = expected.as_hpoly().to_operator(&mut hp)?;
    let residual = &k_op - &rhs;
    if !residual.is_zero() {
        return Err(Error::ResidualNonzero {
            identity: "K = k0 + k1 H + k2 H^2".into(),
            terms: residual.term_count(),
            dump: residual_dump(&residual),
        });
    }
    Ok(expected)
}

/// Exact least-squares-free fit: finds rationals `c` with `target = Σ cᵢ basisᵢ`
/// at a concrete `q`, or `None` when no combination matches.
pub fn fit_combination(target: &DiffOperator, basis: &[DiffOperator], q: &BigRational) -> Option<Vec<BigRational>> {
    use std::collections::BTreeMap;
    let target = target.fix_q(q);
    let basis: Vec<DiffOperator> = basis.iter().map(|b| b.fix_q(q)).collect();
    // One row per (slot, monomial) with columns [basis..., target].
    let mut rows: BTreeMap<String, Vec<BigRational>> = BTreeMap::new();
    let n = basis.len();
    let mut put = |col: usize, op: &DiffOperator| {
        for (slot, f) in op.terms() {
            for (key, c) in f.terms() {
                let value = c.as_constant().expect("coefficients are numeric after fixing q and k");
                let row = rows.entry(format!("{slot:?}{key:?}")).or_insert_with(|| vec![BigRational::zero(); n + 1]);
                row[col] += value;
            }
        }
    };
    for (i, b) in basis.iter().enumerate() {
        put(i, b);
    }
    put(n, &target);
    let mut m: Vec<Vec<BigRational>> = rows.into_values().collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, piv);
        let inv = BigRational::one() / &m[r][col];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=n {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = m[i][n].clone();
    }
    Some(sol)
}

/// Fit mode for `[A, C]`: solves for `(α, γ, δ₀, δ₁, ε₀, ε₁, ζ₀, ζ₁, ζ₂)` at
/// the concrete `q` of `p`.
pub fn fit_ac_coefficients(p: &ModelParams, mutation: Mutation) -> Result<Option<Vec<BigRational>>> {
    let g = Generators::new(p, mutation)?;
    let c = compute_c_with(p, mutation)?;
    let pr = products(&g)?;
    let mut hp = HPowers::new(g.h.clone());
    let h1 = hp.get(1)?.clone();
    let h2 = hp.get(2)?.clone();
    let basis = vec![
        pr.a2.clone(),
        pr.ab_anti.clone(),
        g.a.clone(),
        h1.compose(&g.a)?,
        g.b.clone(),
        h1.compose(&g.b)?,
        DiffOperator::identity(),
        h1,
        h2,
    ];
    Ok(fit_combination(&g.a.commutator(&c)?, &basis, &p.q))
}

/// Fit mode for the Casimir: `(k₀, k₁, k₂, k₃)` at the concrete `q` of `p`.
pub fn fit_casimir(p: &ModelParams, mutation: Mutation) -> Result<Option<Vec<BigRational>>> {
    let co = AlgebraCoefficients::at(p);
    let k_op = casimir_operator(p, &co, mutation)?;
    let h = build_operator_with(OperatorName::H, p, mutation)?;
    let mut hp = HPowers::new(h);
    let basis = (0..4).map(|i| hp.get(i).cloned()).collect::<Result<Vec<_>>>()?;
    Ok(fit_combination(&k_op, &basis, &p.q))
}

/// `[K, A] = [K, B] = 0` for the expected polynomial in `H`.
pub fn casimir_commutes(p: &ModelParams) -> Result<bool> {
    let g = Generators::new(p, Mutation::None)?;
    let mut hp = HPowers::new(g.h.clone());
    let k_op = CasimirPolynomial::expected().fix_k(&p.k).as_hpoly().to_operator(&mut hp)?;
    Ok(k_op.commutator(&g.a)?.is_zero() && k_op.commutator(&g.b)?.is_zero())
}

/// The whole quantum suite as one report: operator identities, first-order
/// algebra, quadratic algebra with Jacobi, and the Casimir.
pub fn full_report(p: &ModelParams, mutation: Mutation) -> Result<VerificationReport> {
    let mut report = operator_identity_check_with(p, mutation)?;
    report.extend(first_order_algebra_check_with(p, mutation)?);
    match quadratic_algebra_check_with(p, mutation) {
        Ok((_, r)) => report.extend(r),
        Err(Error::ResidualNonzero { identity, terms, dump }) => {
            report.push(identity, false, terms);
            report.annotate_last(dump);
        }
        Err(e) => return Err(e),
    }
    match casimir_check_with(p, mutation) {
        Ok(_) => report.push("K = k0 + k1 H + k2 H^2", true, 0),
        Err(Error::ResidualNonzero { identity, terms, dump }) => {
            report.push(identity, false, terms);
            report.annotate_last(dump);
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// A one-line description of the coefficient set for reports.
pub fn describe(co: &AlgebraCoefficients) -> String {
    format!(
        "alpha = {}, gamma = {}, a = {}, delta = {}, epsilon = {}, zeta = {}, d = {}, z = {}",
        co.alpha, co.gamma, co.a, co.delta, co.epsilon, co.zeta, co.d, co.z
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    #[test]
    fn hpoly_arithmetic() {
        let a = HPoly::linear(Poly::int(1), Poly::int(2));
        let b = HPoly::linear(Poly::int(-1), Poly::int(1));
        let prod = a.mul(&b);
        assert_eq!(prod.coeffs(), &[Poly::int(-1), Poly::int(-1), Poly::int(2)]);
        assert_eq!(prod.eval(&rat_int(1), &rat_int(1), &rat_int(3)), rat_int(14));
    }

    #[test]
    fn expected_casimir_expansion() {
        let k = CasimirPolynomial::expected();
        let v = k.eval(&rat_int(1), &rat_int(1));
        // −4[2(7−6) − 3H](2 − H) = −16 + 32H − 12H²
        assert_eq!(v, [rat_int(-16), rat_int(32), rat_int(-12), rat_int(0)]);
        let v = k.eval(&rat_int(2), &rat_int(3));
        // −4·16[8·15 − 3H](24 − H)
        assert_eq!(v[0], rat_int(-64 * 120 * 24));
        assert_eq!(v[2], rat_int(-64 * 3));
    }

    #[test]
    fn coefficient_values() {
        let co = AlgebraCoefficients::published();
        let (q, one, two) = (rat_int(1), rat_int(1), rat_int(2));
        let at1 = co.eval_all(&q, &one, &rat_int(0));
        assert_eq!(at1[0], rat_int(8));
        assert_eq!(at1[4], rat_int(0));
        assert_eq!(co.delta.fix_k(&one).coeffs(), &[Poly::int(8) * Poly::q_pow(4), Poly::int(-8) * Poly::q_pow(2)]);
        assert_eq!(co.eval_all(&q, &two, &rat_int(0))[4], rat_int(48));
        assert!(co.a.is_zero());
    }

    #[test]
    fn fit_recovers_combination() {
        let dx = DiffOperator::dx();
        let dy = DiffOperator::dy();
        let target = &dx.scale(&Poly::int(3)) - &dy.scale(&Poly::q_pow(2));
        let sol = fit_combination(&target, &[dx.clone(), dy.clone()], &rat_int(2)).unwrap();
        assert_eq!(sol, vec![rat_int(3), rat_int(-4)]);
        assert!(fit_combination(&DiffOperator::identity(), &[dx, dy], &rat_int(1)).is_none());
    }
}
