//! Deformed parafermionic realization of the quadratic algebra: structure
//! functions, the truncation conditions that fix `(u, E)`, selection of the
//! physical solutions, and the closed-form tridiagonal matrix of `L` in the
//! basis where `H` and `R` are diagonal.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra_verify::{AlgebraCoefficients, CasimirPolynomial};
use crate::error::{Error, Result};
use crate::model::{energy, energy_poly, l_eigenvalue, ModelParams, Mutation};
use crate::poly::{fmt_rational, rat, rat_int, rat_to_f64, Poly};
use crate::upoly::UPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `u = k/2`, `ν = 2m`.
    Even,
    /// `u = (k + 1)/2`, `ν = 2m + 1`.
    Odd,
}

impl Parity {
    pub fn of_level(level: u32) -> Self {
        if level.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `u` as a polynomial in `k`.
    pub fn u_poly(&self) -> Poly {
        let half = Poly::constant(rat(1, 2));
        match self {
            Parity::Even => &Poly::k() * &half,
            Parity::Odd => &(Poly::k() + Poly::one()) * &half,
        }
    }

    pub fn u(&self, k: &BigRational) -> BigRational {
        match self {
            Parity::Even => k / rat_int(2),
            Parity::Odd => (k + BigRational::one()) / rat_int(2),
        }
    }

    /// `ν = 2m + offset`.
    pub fn nu_offset(&self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The data fixing one structure function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureFunctionParams {
    pub u: BigRational,
    /// Energy eigenvalue including the `q²` factor.
    pub energy: BigRational,
    pub order: u32,
    pub branch: Branch,
}

impl StructureFunctionParams {
    /// `Δ² = (k − 1/2)² + E/q²`.
    pub fn delta_sq(&self, p: &ModelParams) -> BigRational {
        let h = &p.k - rat(1, 2);
        &h * &h + &self.energy / (&p.q * &p.q)
    }
}

/// `A(m) = q² (2m + 2u − k)(2m + 2u + k)`.
pub fn a_eigenvalue(m: u32, u: &BigRational, p: &ModelParams) -> BigRational {
    let s = rat_int(2 * m as i64) + rat_int(2) * u;
    &p.q * &p.q * (&s - &p.k) * (&s + &p.k)
}

/// Structure-constant values at `H = E`.
struct LevelConstants {
    alpha: BigRational,
    gamma: BigRational,
    a: BigRational,
    delta: BigRational,
    epsilon: BigRational,
    zeta: BigRational,
    d: BigRational,
    z: BigRational,
    casimir: BigRational,
}

fn level_constants(e: &BigRational, p: &ModelParams) -> LevelConstants {
    let [alpha, gamma, a, delta, epsilon, zeta, d, z] = AlgebraCoefficients::published().eval_all(&p.q, &p.k, e);
    let casimir = CasimirPolynomial::expected().value_at(&p.q, &p.k, e);
    LevelConstants { alpha, gamma, a, delta, epsilon, zeta, d, z, casimir }
}

fn pw(x: &BigRational, n: u32) -> BigRational {
    num_traits::pow(x.clone(), n as usize)
}

/// The general structure function of the deformed-oscillator realization,
/// built from the structure constants and the Casimir value at `E`.
pub fn phi_general(x: &BigRational, sp: &StructureFunctionParams, p: &ModelParams) -> BigRational {
    let c = level_constants(&sp.energy, p);
    let (al, ga, a, de, ep, ze, d, z, kk) =
        (&c.alpha, &c.gamma, &c.a, &c.delta, &c.epsilon, &c.zeta, &c.d, &c.z, &c.casimir);
    let y = rat_int(2) * (x + &sp.u);
    let (ym3, ym1, yp1) = (&y - rat_int(3), &y - rat_int(1), &y + rat_int(1));
    let nu = x + &sp.u;
    let r = |n: i64| rat_int(n);

    let t1 = -r(3072) * pw(ga, 6) * kk * pw(&ym1, 2);
    let t2 = -r(48) * pw(ga, 6) * (al * al * ep - al * ga * de + a * ga * ep - d * ga * ga) * &ym3 * pw(&ym1, 4) * &yp1;
    let t3 = pw(ga, 8) * (r(3) * al * al + r(4) * a * ga) * pw(&ym3, 2) * pw(&ym1, 4) * pw(&yp1, 2);
    let inner = al * ep * ep - r(2) * ga * de * ep + r(4) * ga * ga * ze;
    let t4 = r(768) * &inner * &inner;
    let t5 = r(32)
        * pw(ga, 4)
        * (r(3) * al * al * ep * ep - r(6) * al * ga * de * ep + r(2) * a * ga * ep * ep + r(2) * ga * ga * de * de
            - r(4) * d * ga * ga * ep
            + r(8) * pw(ga, 3) * z
            + r(4) * al * ga * ga * ze)
        * pw(&ym1, 2)
        * (r(12) * &nu * &nu - r(12) * &nu - r(1));
    let t6 = -r(256)
        * ga
        * ga
        * (r(3) * al * al * pw(ep, 3) - r(9) * al * ga * de * ep * ep
            + a * ga * pw(ep, 3)
            + r(6) * ga * ga * de * de * ep
            - r(3) * d * ga * ga * ep * ep
            + r(2) * pw(ga, 4) * de * de
            + r(2) * d * pw(ga, 4) * ep
            + r(12) * pw(ga, 3) * ep * z
            - r(4) * pw(ga, 5) * z
            + r(12) * al * ga * ga * ep * ze
            - r(12) * pw(ga, 3) * de * ze
            + r(4) * al * pw(ga, 4) * ze)
        * pw(&ym1, 2);
    t1 + t2 + t3 + t4 + t5 + t6
}

/// The model's factorized structure function. `Δ` enters only through the
/// conjugate pairs `(y + Δ)(y − Δ) = y² − Δ²`.
pub fn phi_factorized(x: &BigRational, sp: &StructureFunctionParams, p: &ModelParams) -> Result<BigRational> {
    let d2 = sp.delta_sq(p);
    if d2.is_negative() {
        return Err(Error::ComplexDelta { radicand: fmt_rational(&d2) });
    }
    Ok(phi_factorized_unchecked(x, &sp.u, &d2, p))
}

fn phi_factorized_unchecked(x: &BigRational, u: &BigRational, d2: &BigRational, p: &ModelParams) -> BigRational {
    let s = rat_int(2) * (x + u);
    let k = &p.k;
    let one = BigRational::one();
    let lin = (&s + k - &one) * (&s + k - rat_int(2)) * (&s - k) * (&s - k - &one);
    let y1 = &s - rat(1, 2);
    let y2 = &s - rat(3, 2);
    let pairs = (&y1 * &y1 - d2) * (&y2 * &y2 - d2);
    phi_prefactor(p) * lin * pairs
}

/// `3·2³⁰ q²⁰`.
fn phi_prefactor(p: &ModelParams) -> BigRational {
    rat_int(3) * pw(&rat_int(2), 30) * pw(&p.q, 20)
}

/// The branch forms of the structure function after `Φ(p + 1) = 0` has
/// been imposed (normalized with `3·2³⁸ q²⁰`).
pub fn phi_branch(x: &BigRational, order: u32, parity: Parity, branch: Branch, p: &ModelParams) -> BigRational {
    let pm = match branch {
        Branch::Upper => BigRational::one(),
        Branch::Lower => -BigRational::one(),
    };
    let quarter = &pm * rat(1, 4);
    let half = &pm * rat(1, 2);
    let po = rat_int(order as i64);
    let k = &p.k;
    let one = BigRational::one();
    let common = x * (&po + &one - x) * (&po + &one + &half - x);
    let rest = match parity {
        Parity::Even => {
            (x - rat(1, 2))
                * (x + k - rat(1, 2))
                * (x + k - &one)
                * (x + &po + k + rat(1, 4) + &quarter)
                * (x + &po + k - rat(1, 4) + &quarter)
        }
        Parity::Odd => {
            (x + rat(1, 2))
                * (x + k)
                * (x + k - rat(1, 2))
                * (x + &po + k + rat(5, 4) + &quarter)
                * (x + &po + k + rat(3, 4) + &quarter)
        }
    };
    rat_int(3) * pw(&rat_int(2), 38) * pw(&p.q, 20) * common * rest
}

/// Ratio `phi_general / phi_factorized` over a set of sample points; `Some`
/// only when it is the same nonzero constant at every point where the
/// factorized value is nonzero.
pub fn measure_normalization_ratio(
    samples: &[(BigRational, StructureFunctionParams, ModelParams)],
) -> Result<Option<BigRational>> {
    let mut ratio: Option<BigRational> = None;
    for (x, sp, p) in samples {
        let f = phi_factorized(x, sp, p)?;
        let g = phi_general(x, sp, p);
        if f.is_zero() {
            if !g.is_zero() {
                return Ok(None);
            }
            continue;
        }
        let r = g / f;
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if *prev != r => return Ok(None),
            _ => {}
        }
    }
    Ok(ratio)
}

/// One candidate finite-dimensional representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationSolution {
    pub params: StructureFunctionParams,
    pub parity: Parity,
    /// `Δ` (rational here, as a root of `Φ(p + 1) = 0`).
    pub delta: BigRational,
    pub a_eigenvalues: Vec<BigRational>,
    /// `Φ(0) = 0`, `Φ(p+1) = 0`, `Φ(x) > 0` on `1..=p`, `A(m) ≥ 0`.
    pub admissible: bool,
    pub rejections: Vec<String>,
    /// Set by [`physical_filter`].
    pub level: Option<u32>,
    pub physical: bool,
}

/// The positive `Δ` roots of the `Δ`-dependent factors of `Φ(p + 1)`:
/// the upper branch `2(p+1) + 2u − 1/2` and the lower `2(p+1) + 2u − 3/2`.
fn delta_roots(order: u32, u: &BigRational) -> [(Branch, BigRational); 2] {
    let s = rat_int(2 * (order as i64 + 1)) + rat_int(2) * u;
    [(Branch::Upper, &s - rat(1, 2)), (Branch::Lower, &s - rat(3, 2))]
}

/// Enumerates the four `(u, branch)` candidates at parafermionic order `p`,
/// solving `Φ(p+1) = 0` for `Δ` and hence `E = q²(Δ² − (k − 1/2)²)`.
pub fn solve_representations(order: u32, p: &ModelParams) -> Vec<RepresentationSolution> {
    let cands: Vec<(Parity, Branch, BigRational)> = [Parity::Even, Parity::Odd]
        .into_iter()
        .flat_map(|par| {
            let u = par.u(&p.k);
            delta_roots(order, &u).into_iter().map(move |(b, d)| (par, b, d))
        })
        .collect();
    cands
        .into_par_iter()
        .map(|(parity, branch, delta)| {
            let u = parity.u(&p.k);
            let h = &p.k - rat(1, 2);
            let energy = &p.q * &p.q * (&delta * &delta - &h * &h);
            let sp = StructureFunctionParams { u: u.clone(), energy, order, branch };
            let d2 = &delta * &delta;
            let phi = |x: i64| phi_factorized_unchecked(&rat_int(x), &u, &d2, p);
            let mut rejections = Vec::new();
            if !phi(0).is_zero() {
                rejections.push("Phi(0) != 0".to_string());
            }
            if !phi(order as i64 + 1).is_zero() {
                rejections.push(format!("Phi({}) != 0", order + 1));
            }
            for x in 1..=order as i64 {
                if !phi(x).is_positive() {
                    rejections.push(format!("Phi({x}) <= 0"));
                }
            }
            let a_eigenvalues: Vec<BigRational> = (0..=order).map(|m| a_eigenvalue(m, &u, p)).collect();
            if let Some(m) = a_eigenvalues.iter().position(|a| a.is_negative()) {
                rejections.push(format!("A({m}) < 0"));
            }
            RepresentationSolution {
                params: sp,
                parity,
                delta,
                a_eigenvalues,
                admissible: rejections.is_empty(),
                rejections,
                level: None,
                physical: false,
            }
        })
        .collect()
}

/// The level whose parity-consistent order is `order`.
pub fn level_for(order: u32, parity: Parity) -> u32 {
    2 * order + parity.nu_offset()
}

/// Keeps admissible solutions whose energy equals `energy(N)` for the level
/// `N` with matching parity and `p = ⌊N/2⌋`; annotates `N`.
pub fn physical_filter(sols: Vec<RepresentationSolution>, p: &ModelParams) -> Vec<RepresentationSolution> {
    sols.into_iter()
        .filter_map(|mut s| {
            if !s.admissible {
                return None;
            }
            let n = level_for(s.params.order, s.parity);
            if energy(n, p) == s.params.energy {
                s.level = Some(n);
                s.physical = true;
                Some(s)
            } else {
                None
            }
        })
        .collect()
}

/// All candidates at `order` with the filter verdict recorded instead of dropping.
pub fn classify_representations(order: u32, p: &ModelParams) -> Vec<RepresentationSolution> {
    let sols = solve_representations(order, p);
    let kept = physical_filter(sols.clone(), p);
    sols.into_iter()
        .map(|mut s| {
            if let Some(k) = kept.iter().find(|k| k.parity == s.parity && k.params.branch == s.params.branch) {
                s.level = k.level;
                s.physical = true;
            } else if s.admissible {
                s.rejections.push("energy matches no level of the spectrum".into());
            }
            s
        })
        .collect()
}

/// A solution with `k` left symbolic: `u`, `Δ`, `E` as polynomials in `(q, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSolution {
    pub order: u32,
    pub parity: Parity,
    pub branch: Branch,
    pub u: Poly,
    pub delta: Poly,
    pub energy: Poly,
}

pub fn solve_representations_symbolic(order: u32) -> Vec<SymbolicSolution> {
    let mut out = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let u = parity.u_poly();
        let s = &Poly::int(2 * (order as i64 + 1)) + &u.scale(&rat_int(2));
        for (branch, shift) in [(Branch::Upper, rat(1, 2)), (Branch::Lower, rat(3, 2))] {
            let delta = &s - &Poly::constant(shift);
            let h = &Poly::k() - &Poly::constant(rat(1, 2));
            let energy = Poly::q_pow(2) * (&(&delta * &delta) - &(&h * &h));
            out.push(SymbolicSolution { order, parity, branch, u: u.clone(), delta, energy });
        }
    }
    out
}

/// Symbolic counterpart of [`physical_filter`]: `E` must equal `energy(N)`
/// identically in `(q, k)`.
pub fn physical_filter_symbolic(sols: &[SymbolicSolution]) -> Vec<(SymbolicSolution, u32)> {
    sols.iter()
        .filter_map(|s| {
            let n = level_for(s.order, s.parity);
            (s.energy == energy_poly(n)).then(|| (s.clone(), n))
        })
        .collect()
}

fn check_parity(nu: u32, level: u32) -> Result<()> {
    if nu > level || !(level - nu).is_multiple_of(2) {
        return Err(Error::ParityMismatch { nu, level });
    }
    Ok(())
}

/// `Φ_ν = 3·2³⁰q²⁰ ν(ν−1)(ν+2k−1)(ν+2k−2)(N+ν+2k)(N+ν+2k+1)(N−ν+2)(N−ν+3)`.
pub fn phi_nu(nu: u32, level: u32, p: &ModelParams) -> Result<BigRational> {
    check_parity(nu, level)?;
    let (v, n, k) = (rat_int(nu as i64), rat_int(level as i64), &p.k);
    let two_k = rat_int(2) * k;
    let one = BigRational::one();
    let f = &v
        * (&v - &one)
        * (&v + &two_k - &one)
        * (&v + &two_k - rat_int(2))
        * (&n + &v + &two_k)
        * (&n + &v + &two_k + &one)
        * (&n - &v + rat_int(2))
        * (&n - &v + rat_int(3));
    Ok(phi_prefactor(p) * f)
}

/// `σ_ν` as a reduced rational function of `k` (numerator, denominator) for
/// fixed integers `ν`, `N`, without the `q²` factor.
fn sigma_rational(nu: u32, level: u32, mutation: Mutation) -> (UPoly, UPoly) {
    let kx = UPoly::x();
    let c = |v: i64| UPoly::constant(rat_int(v));
    let (v, n) = (nu as i64, level as i64);
    let pk = &(&kx + &c(v - 1)) * &(&kx + &c(v + 1));
    let sign = if mutation == Mutation::SigmaCoefficient { -1 } else { 1 };
    // N² + (2k+3)N + 2k² + 2k + 1
    let bracket = &(&c(n * n + 3 * n + sign) + &kx.scale(&rat_int(2 * n + 2))) + &(&kx * &kx).scale(&rat_int(2));
    let kk1 = &kx * &(&kx - &c(1));
    let tail = &(&kk1 * &(&kx + &c(n + 1))) * &(&kx + &c(n + 2));
    let num = &(&(-&(&pk * &pk)) + &(&bracket * &pk)) - &tail;
    let den = pk.scale(&rat_int(2));
    reduce(num, den)
}

fn reduce(num: UPoly, den: UPoly) -> (UPoly, UPoly) {
    let g = num.gcd(&den);
    if g.degree().unwrap_or(0) == 0 {
        return (num, den);
    }
    let (n, _) = num.div_rem(&g);
    let (d, _) = den.div_rem(&g);
    (n, d)
}

fn eval_rational(num: &UPoly, den: &UPoly, k: &BigRational, what: &str) -> Result<BigRational> {
    let d = den.eval(k);
    if d.is_zero() {
        return Err(Error::ParamOutOfRange(format!("{what} has a pole at k = {}", fmt_rational(k))));
    }
    Ok(num.eval(k) / d)
}

/// Diagonal element `σ_ν` of `L` (including `q²`). The removable pole at
/// `(ν+k−1)(ν+k+1) = 0` is cancelled by exact polynomial division in `k`.
pub fn sigma_nu(nu: u32, level: u32, p: &ModelParams) -> Result<BigRational> {
    sigma_nu_with(nu, level, p, Mutation::None)
}

pub fn sigma_nu_with(nu: u32, level: u32, p: &ModelParams, mutation: Mutation) -> Result<BigRational> {
    check_parity(nu, level)?;
    let (num, den) = sigma_rational(nu, level, mutation);
    Ok(&p.q * &p.q * eval_rational(&num, &den, &p.k, "sigma")?)
}

/// `τ_ν² = q⁴ ν(ν−1)(ν+2k−1)(ν+2k−2)(N−ν+2)(N−ν+3)(N+ν+2k)(N+ν+2k+1) / (16(ν+k−2)(ν+k−1)²(ν+k))`.
pub fn tau_nu_sq(nu: u32, level: u32, p: &ModelParams) -> Result<BigRational> {
    check_parity(nu, level)?;
    let kx = UPoly::x();
    let c = |v: i64| UPoly::constant(rat_int(v));
    let (v, n) = (nu as i64, level as i64);
    let two_k = kx.scale(&rat_int(2));
    let factors = [
        c(v),
        c(v - 1),
        &two_k + &c(v - 1),
        &two_k + &c(v - 2),
        c(n - v + 2),
        c(n - v + 3),
        &two_k + &c(n + v),
        &two_k + &c(n + v + 1),
    ];
    let num = factors.iter().fold(c(1), |acc, f| &acc * f);
    let den_factors = [&kx + &c(v - 2), &kx + &c(v - 1), &kx + &c(v - 1), &kx + &c(v)];
    let den = den_factors.iter().fold(c(16), |acc, f| &acc * f);
    let (num, den) = reduce(num, den);
    Ok(pw(&p.q, 4) * eval_rational(&num, &den, &p.k, "tau^2")?)
}

/// `ρ²(N)` of the realization at `N + u = w`.
pub fn rho_sq(w: &BigRational, p: &ModelParams) -> BigRational {
    let gamma = rat_int(8) * &p.q * &p.q;
    let t = rat_int(2) * w + BigRational::one();
    BigRational::one() / (rat_int(3) * pw(&rat_int(2), 12) * pw(&gamma, 8) * w * (w + BigRational::one()) * &t * &t)
}

/// `σ(m)` from the general realization formula with the structure constants
/// at `E`. Fails at `(m + u)² = 1/4`, where only the reduced closed form is finite.
pub fn sigma_general(m: u32, u: &BigRational, e: &BigRational, p: &ModelParams) -> Result<BigRational> {
    let c = level_constants(e, p);
    let w = rat_int(m as i64) + u;
    let s = &w * &w - rat(1, 4);
    if s.is_zero() {
        return Err(Error::ParamOutOfRange(format!("(m + u)^2 = 1/4 at m = {m}, u = {}", fmt_rational(u))));
    }
    let g2 = &c.gamma * &c.gamma;
    Ok(-(&c.alpha / rat_int(4)) * &s + (&c.alpha * &c.epsilon - &c.gamma * &c.delta) / (rat_int(2) * &g2)
        - (&c.alpha * &c.epsilon * &c.epsilon - rat_int(2) * &c.gamma * &c.delta * &c.epsilon
            + rat_int(4) * &g2 * &c.zeta)
            / (rat_int(4) * &g2 * &g2)
            / s)
}

/// `ν` values of level `N`, ascending: `N mod 2, …, N`.
pub fn nu_values(level: u32) -> Vec<u32> {
    (level % 2..=level).step_by(2).collect()
}

/// `L` in the `(H, R)` basis of one level. Rows are ordered by ascending `ν`;
/// `tau_sq[i]` couples `ν_i` and `ν_{i+1}` (it is `τ²` at `ν_{i+1}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LTridiagonal {
    pub level: u32,
    pub nus: Vec<u32>,
    pub sigma: Vec<BigRational>,
    pub tau_sq: Vec<BigRational>,
    pub phases: Vec<i8>,
    pub params: ModelParams,
}

/// Assembles `L`; `phases[i]` is `s_ν` at `ν_{i+1}` and defaults to `−1`.
pub fn l_tridiagonal(level: u32, p: &ModelParams, phases: Option<Vec<i8>>) -> Result<LTridiagonal> {
    l_tridiagonal_with(level, p, phases, Mutation::None)
}

pub fn l_tridiagonal_with(
    level: u32,
    p: &ModelParams,
    phases: Option<Vec<i8>>,
    mutation: Mutation,
) -> Result<LTridiagonal> {
    let nus = nu_values(level);
    let sigma = nus.iter().map(|&nu| sigma_nu_with(nu, level, p, mutation)).collect::<Result<Vec<_>>>()?;
    let tau_sq = nus[1..].iter().map(|&nu| tau_nu_sq(nu, level, p)).collect::<Result<Vec<_>>>()?;
    let phases = phases.unwrap_or_else(|| vec![-1; tau_sq.len()]);
    if phases.len() != tau_sq.len() || phases.iter().any(|s| s.abs() != 1) {
        return Err(Error::InvalidParams(format!("need {} phases in {{+1, -1}}", tau_sq.len())));
    }
    Ok(LTridiagonal { level, nus, sigma, tau_sq, phases, params: p.clone() })
}

impl LTridiagonal {
    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    /// Exact characteristic polynomial `det(M − λ)` via the three-term recurrence.
    pub fn characteristic_polynomial(&self) -> UPoly {
        let lam = UPoly::x();
        let mut prev = UPoly::constant(BigRational::one());
        let mut cur = &UPoly::constant(self.sigma[0].clone()) - &lam;
        for i in 1..self.dim() {
            let next = &(&(&UPoly::constant(self.sigma[i].clone()) - &lam) * &cur) - &prev.scale(&self.tau_sq[i - 1]);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `{q²(l + 1)² : l = N, N−2, …}`.
    pub fn expected_eigenvalues(&self) -> Vec<BigRational> {
        let mut v: Vec<BigRational> =
            (self.level % 2..=self.level).step_by(2).map(|l| l_eigenvalue(l, &self.params)).collect();
        v.sort();
        v
    }

    /// True when the characteristic polynomial is `Π (λ_l − λ)` exactly.
    pub fn eigenvalues_exact(&self) -> bool {
        let target = self
            .expected_eigenvalues()
            .iter()
            .fold(UPoly::constant(BigRational::one()), |acc, l| &acc * &(&UPoly::constant(l.clone()) - &UPoly::x()));
        self.characteristic_polynomial() == target
    }

    /// `Σ σ_ν = q² Σ (l + 1)²`.
    pub fn trace_identity(&self) -> bool {
        let tr: BigRational = self.sigma.iter().sum();
        let want: BigRational = self.expected_eigenvalues().iter().sum();
        tr == want
    }

    /// Signed off-diagonal `τ_ν = s_ν |τ_ν|` as floats.
    pub fn tau_f64(&self) -> Vec<f64> {
        self.tau_sq.iter().zip(&self.phases).map(|(t, &s)| s as f64 * rat_to_f64(t).sqrt()).collect()
    }

    pub fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = rat_to_f64(&self.sigma[i]);
        }
        for (i, t) in self.tau_f64().into_iter().enumerate() {
            m[(i, i + 1)] = t;
            m[(i + 1, i)] = t;
        }
        m
    }

    /// Eigenvalues in ascending order from a floating-point diagonalization.
    pub fn eigenvalues_f64(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(self.to_matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// An entry `coef · √radicand` of a weighted-shift matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdEntry {
    pub coef: BigRational,
    pub radicand: BigRational,
}

impl SurdEntry {
    fn mul(&self, o: &SurdEntry) -> SurdEntry {
        SurdEntry { coef: &self.coef * &o.coef, radicand: &self.radicand * &o.radicand }
    }

    fn is_zero(&self) -> bool {
        self.coef.is_zero() || self.radicand.is_zero()
    }

    /// Exact comparison with a rational value.
    fn equals_rational(&self, v: &BigRational) -> bool {
        if self.is_zero() {
            return v.is_zero();
        }
        self.coef.is_positive() == v.is_positive() && &self.coef * &self.coef * &self.radicand == v * v
    }
}

/// Operator on the span of `|0⟩…|dim−1⟩` mapping `|m⟩ ↦ e_m |m + shift⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftMatrix {
    pub dim: usize,
    pub shift: i64,
    pub entries: Vec<SurdEntry>,
}

impl ShiftMatrix {
    /// `b†` with `b†|m⟩ = √Φ(m+1) |m+1⟩`.
    pub fn creation(phi: &[BigRational]) -> Self {
        let dim = phi.len();
        let entries = (0..dim)
            .map(|m| SurdEntry {
                coef: BigRational::one(),
                radicand: if m + 1 < dim { phi[m + 1].clone() } else { BigRational::zero() },
            })
            .collect();
        Self { dim, shift: 1, entries }
    }

    /// `b` with `b|m⟩ = √Φ(m) |m−1⟩`.
    pub fn annihilation(phi: &[BigRational]) -> Self {
        let entries = phi.iter().map(|v| SurdEntry { coef: BigRational::one(), radicand: v.clone() }).collect();
        Self { dim: phi.len(), shift: -1, entries }
    }

    pub fn number(dim: usize) -> Self {
        let entries = (0..dim).map(|m| SurdEntry { coef: rat_int(m as i64), radicand: BigRational::one() }).collect();
        Self { dim, shift: 0, entries }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ShiftMatrix) -> ShiftMatrix {
        let entries = (0..self.dim)
            .map(|m| {
                let mid = m as i64 + other.shift;
                if mid < 0 || mid >= self.dim as i64 {
                    SurdEntry { coef: BigRational::zero(), radicand: BigRational::zero() }
                } else {
                    self.entries[mid as usize].mul(&other.entries[m])
                }
            })
            .collect();
        ShiftMatrix { dim: self.dim, shift: self.shift + other.shift, entries }
    }

    /// Entries whose target index falls outside the space are ignored.
    pub fn is_zero(&self) -> bool {
        (0..self.dim).all(|m| {
            let t = m as i64 + self.shift;
            t < 0 || t >= self.dim as i64 || self.entries[m].is_zero()
        })
    }

    fn diagonal_equals(&self, values: &[BigRational]) -> bool {
        self.shift == 0 && self.entries.iter().zip(values).all(|(e, v)| e.equals_rational(v))
    }
}

/// Fock-space checks for a structure function given at `x = 0..=p+1`:
/// `b†b = Φ(N)`, `bb† = Φ(N+1)`, `[N, b†] = b†`, and `(b†)^{p+1} = 0`.
pub fn fock_contract(phi_values: &[BigRational]) -> bool {
    let dim = phi_values.len() - 1; // states 0..=p
    let phi = &phi_values[..dim];
    let bd = ShiftMatrix::creation(phi);
    let b = ShiftMatrix::annihilation(phi);
    let shifted: Vec<BigRational> = phi_values[1..].to_vec();
    // bb†|p⟩ = Φ(p+1)|p⟩ and must vanish on the truncated space.
    let ok_bdb = bd.compose(&b).diagonal_equals(phi);
    let ok_bbd = b.compose(&bd).diagonal_equals(&shifted);
    let nb = ShiftMatrix::number(dim).compose(&bd);
    let bn = bd.compose(&ShiftMatrix::number(dim));
    let ok_comm = nb.entries.iter().zip(&bn.entries).zip(&bd.entries).all(|((x, y), z)| {
        // N b† − b† N acts as (m+1 − m) √Φ(m+1) = √Φ(m+1).
        x.radicand == y.radicand && x.radicand == z.radicand && &x.coef - &y.coef == z.coef || z.is_zero()
    });
    // One extra state shows (b†)^{p+1}|0⟩ ∝ √(Φ(1)…Φ(p+1)) vanishes because Φ(p+1) = 0.
    let extended = ShiftMatrix::creation(phi_values);
    let top = (0..dim).fold(ShiftMatrix::number(dim + 1).with_identity(), |acc, _| extended.compose(&acc));
    let ok_trunc = top.entries[0].is_zero();
    ok_bdb && ok_bbd && ok_comm && ok_trunc
}

impl ShiftMatrix {
    fn with_identity(&self) -> ShiftMatrix {
        let entries =
            (0..self.dim).map(|_| SurdEntry { coef: BigRational::one(), radicand: BigRational::one() }).collect();
        ShiftMatrix { dim: self.dim, shift: 0, entries }
    }
}

/// The `Φ_ν` values of level `N` as a structure function `Φ(m)`, `m = 0..=p+1`.
pub fn phi_sequence(level: u32, p: &ModelParams) -> Result<Vec<BigRational>> {
    let parity = Parity::of_level(level);
    let order = level / 2;
    let u = parity.u(&p.k);
    let sp = StructureFunctionParams { u, energy: energy(level, p), order, branch: Branch::Upper };
    (0..=order + 1).map(|m| phi_factorized(&rat_int(m as i64), &sp, p)).collect()
}

/// Per-level representation report.
#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    #[serde(rename = "N")]
    pub level: u32,
    #[serde(rename = "E")]
    pub energy: String,
    pub p: u32,
    pub parity: Parity,
    pub u: String,
    #[serde(rename = "A_eigenvalues")]
    pub a_eigenvalues: Vec<String>,
    pub sigma: Vec<String>,
    pub tau_sq: Vec<String>,
    pub tau_abs: Vec<f64>,
    pub phases: Vec<i8>,
    pub eigencheck: &'static str,
}

pub fn level_report(level: u32, p: &ModelParams, mutation: Mutation) -> Result<LevelReport> {
    let parity = Parity::of_level(level);
    let order = level / 2;
    let u = parity.u(&p.k);
    let lt = l_tridiagonal_with(level, p, None, mutation)?;
    let s = |v: &BigRational| fmt_rational(v);
    Ok(LevelReport {
        level,
        energy: s(&energy(level, p)),
        p: order,
        parity,
        u: s(&u),
        a_eigenvalues: (0..=order).map(|m| s(&a_eigenvalue(m, &u, p))).collect(),
        sigma: lt.sigma.iter().map(s).collect(),
        tau_sq: lt.tau_sq.iter().map(s).collect(),
        tau_abs: lt.tau_sq.iter().map(|t| rat_to_f64(t).sqrt()).collect(),
        phases: lt.phases.clone(),
        eigencheck: if lt.eigenvalues_exact() && lt.trace_identity() { "pass" } else { "fail" },
    })
}
