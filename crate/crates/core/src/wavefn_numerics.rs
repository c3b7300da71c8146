//! First-basis wavefunctions, quadrature on the layer, and the numerical
//! construction of the second basis by diagonalizing `R` inside each
//! degenerate level.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_operator, degeneracy, energy_poly, l_eigenvalue, r_eigenvalue, ModelParams, OperatorName};
use crate::poly::{rat, rat_int, rat_to_f64, Poly};
use crate::symkernel::{
    cos_multiple, sin_multiple, DiffOperator, Exponent, MonoKey, RingElement, SymFunction, TrigPoint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FirstBasisLabel {
    pub n: u32,
    pub l: u32,
}

impl FirstBasisLabel {
    pub fn level(&self) -> u32 {
        2 * self.n + self.l
    }

    /// Members of level `N`, ordered by descending `l`: `(0, N), (1, N−2), …`.
    pub fn level_members(level: u32) -> Vec<FirstBasisLabel> {
        (0..=level / 2).map(|n| FirstBasisLabel { n, l: level - 2 * n }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SecondBasisLabel {
    #[serde(rename = "N")]
    pub level: u32,
    pub nu: u32,
}

impl SecondBasisLabel {
    pub fn new(level: u32, nu: u32) -> Result<Self> {
        if nu > level || !(level - nu).is_multiple_of(2) {
            return Err(Error::ParityMismatch { nu, level });
        }
        Ok(Self { level, nu })
    }

    /// `N₀ = N − ν`.
    pub fn n0(&self) -> u32 {
        self.level - self.nu
    }
}

fn check_jacobi_params(a: f64, b: f64) -> Result<()> {
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::ParamOutOfRange(format!("Jacobi parameters need a, b > -1 (got a = {a}, b = {b})")));
    }
    Ok(())
}

/// `P_n^{(a,b)}(t)` by the three-term recurrence.
pub fn jacobi_poly(n: u32, a: f64, b: f64, t: f64) -> Result<f64> {
    check_jacobi_params(a, b)?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (t - 1.0) / 2.0;
    for m in 2..=n {
        let m = m as f64;
        let s = 2.0 * m + a + b;
        let c1 = 2.0 * m * (m + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        let c3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * s;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `binomial(n + a, m)` for a symbolic `a`.
fn binomial_poly(top: &Poly, m: u32) -> Poly {
    let mut out = Poly::one();
    let mut fact = BigRational::one();
    for i in 0..m {
        out = &out * &(top - &Poly::int(i as i64));
        fact *= rat_int(i as i64 + 1);
    }
    out.scale(&(BigRational::one() / fact))
}

fn binomial_int(n: i64, m: u32) -> BigRational {
    (0..m as i64).fold(BigRational::one(), |acc, i| acc * rat_int(n - i) / rat_int(i + 1))
}

/// Which `y` factor multiplies the `x` part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YFactor {
    /// `cos((l+1)qy)` for even `l`, `sin((l+1)qy)` for odd `l`.
    Physical,
    /// The partner that violates the boundary condition at `y = ±π/(2q)`.
    Unphysical,
}

fn y_factor(l: u32, which: YFactor) -> SymFunction {
    let even = l.is_multiple_of(2);
    match (even, which) {
        (true, YFactor::Physical) | (false, YFactor::Unphysical) => cos_multiple(l + 1),
        _ => sin_multiple(l + 1),
    }
}

/// `(tanh qx)^k (sech qx)^{l+2} P_n^{(k−1/2, l+1)}(1 − 2tanh²qx) χ_l(y)` with
/// `k` symbolic. With `z = 1 − 2t²` the Jacobi sum is
/// `Σ_s C(n+a, n−s) C(n+b, s) (−t²)^s (sech²)^{n−s}`, so every term shares the
/// cosh exponent `−k − l − 2 − 2n`.
pub fn psi_generic(label: FirstBasisLabel, which: YFactor) -> SymFunction {
    let FirstBasisLabel { n, l } = label;
    let top = &Poly::k() - &Poly::constant(rat(1, 2)) + Poly::int(n as i64);
    let cosh_exp = Exponent::minus_k_plus(-(l as i64 + 2 + 2 * n as i64));
    let mut x_part = RingElement::zero();
    for s in 0..=n {
        let sign = if s % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let c = binomial_poly(&top, n - s).scale(&(sign * binomial_int((n + l + 1) as i64, s)));
        x_part += &RingElement::monomial(c, MonoKey::new(Exponent::k_plus(2 * s as i64), cosh_exp, 0, 0));
    }
    x_part.mul(&y_factor(l, which))
}

/// First-basis member at fixed `k` (unnormalized).
pub fn psi_first_basis(label: FirstBasisLabel, p: &ModelParams) -> SymFunction {
    psi_generic(label, YFactor::Physical).fix_k(&p.k)
}

pub fn psi_unphysical(label: FirstBasisLabel, p: &ModelParams) -> SymFunction {
    psi_generic(label, YFactor::Unphysical).fix_k(&p.k)
}

/// `ω_s = (tanh qx)^k (sech qx)^{s+1} (cos qy)^s`, annihilated by `η`.
pub fn zero_mode(s: u32, p: &ModelParams) -> SymFunction {
    zero_mode_generic(s, false).fix_k(&p.k)
}

/// `ω̄_s = (tanh qx)^k (sech qx)^{s+1} (sin qy)^s`, annihilated by `η̄`.
pub fn zero_mode_bar(s: u32, p: &ModelParams) -> SymFunction {
    zero_mode_generic(s, true).fix_k(&p.k)
}

fn zero_mode_generic(s: u32, bar: bool) -> SymFunction {
    let x = RingElement::monomial(
        Poly::one(),
        MonoKey::new(Exponent::k_plus(0), Exponent::minus_k_plus(-(s as i64 + 1)), 0, 0),
    );
    let y = if bar { RingElement::sin_pow(s) } else { RingElement::cos_pow(s) };
    x.mul(&y)
}

/// Whether a function meets the Dirichlet conditions on the layer boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryCheck {
    pub vanishes_at_x0: bool,
    pub vanishes_at_y_edges: bool,
}

impl BoundaryCheck {
    pub fn physical(&self) -> bool {
        self.vanishes_at_x0 && self.vanishes_at_y_edges
    }
}

/// Exact boundary values of a fixed-`k` function. At `x = 0` terms with
/// a positive sinh power vanish, zero powers survive (cosh 0 = 1) and
/// negative powers are singular. At `y = ±π/(2q)`, `cos = 0` and `sin = ±1`.
pub fn boundary_check(f: &SymFunction, k: &BigRational) -> Result<BoundaryCheck> {
    let mut at_x0 = RingElement::zero();
    let (mut top, mut bottom) = (RingElement::zero(), RingElement::zero());
    for (key, c) in f.terms() {
        let sinh_exp = key.sinh.as_poly().fix_k(k).as_constant().unwrap_or_else(BigRational::zero);
        if sinh_exp.is_negative() {
            return Err(Error::SingularPoint);
        }
        if sinh_exp.is_zero() {
            at_x0 += &RingElement::monomial(c.clone(), MonoKey::new(Exponent::ZERO, Exponent::ZERO, key.sin, key.cos));
        }
        if key.cos == 0 {
            let x_key = MonoKey::new(key.sinh, key.cosh, 0, 0);
            top += &RingElement::monomial(c.clone(), x_key);
            let sign = if key.sin % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            bottom += &RingElement::monomial(c.scale(&sign), x_key);
        }
    }
    Ok(BoundaryCheck { vanishes_at_x0: at_x0.is_zero(), vanishes_at_y_edges: top.is_zero() && bottom.is_zero() })
}

/// Tensor Gauss–Legendre rule on the layer. `x` nodes are stored as
/// `t = tanh qx ∈ (0, 1)`, and the weights carry the Jacobian
/// `dx = dt / (q(1 − t²))`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub q: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub t_nodes: Vec<f64>,
    pub x_weights: Vec<f64>,
    pub y_nodes: Vec<f64>,
    pub y_weights: Vec<f64>,
}

pub const DEFAULT_NX: usize = 200;
pub const DEFAULT_NY: usize = 64;

fn gauss_on(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = NonZeroUsize::new(n).ok_or_else(|| Error::ParamOutOfRange("quadrature needs at least one node".into()))?;
    let rule = GaussLegendre::new(n);
    let (half, mid) = ((b - a) / 2.0, (a + b) / 2.0);
    Ok(rule.iter().map(|&(u, w)| (mid + half * u, half * w)).unzip())
}

impl QuadratureGrid {
    pub fn new(n_x: usize, n_y: usize, q: f64) -> Result<Self> {
        let (t_nodes, tw) = gauss_on(n_x, 0.0, 1.0)?;
        let x_weights = t_nodes.iter().zip(&tw).map(|(t, w)| w / (q * (1.0 - t) * (1.0 + t))).collect();
        let edge = std::f64::consts::FRAC_PI_2 / q;
        let (y_nodes, y_weights) = gauss_on(n_y, -edge, edge)?;
        Ok(Self { q, n_x, n_y, t_nodes, x_weights, y_nodes, y_weights })
    }

    pub fn default_for(p: &ModelParams) -> Result<Self> {
        Self::new(DEFAULT_NX, DEFAULT_NY, p.q_f64())
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        self.t_nodes.iter().map(|t| t.atanh() / self.q).collect()
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `∫∫ sech² qx dx dy`; the analytic value is `π/q²`.
    pub fn integrate_sech2(&self) -> f64 {
        let ix: f64 = self.t_nodes.iter().zip(&self.x_weights).map(|(t, w)| w * (1.0 - t * t)).sum();
        ix * self.y_weights.iter().sum::<f64>()
    }

    /// Function values at the nodes, `x`-major.
    pub fn sample(&self, f: &SymFunction, p: &ModelParams) -> Vec<f64> {
        let compiled = f.compile(p.q_f64(), p.k_f64());
        self.t_nodes
            .par_iter()
            .flat_map_iter(|&t| {
                let compiled = &compiled;
                self.y_nodes.iter().map(move |&y| compiled.eval(&TrigPoint::from_tanh(t, y, self.q)))
            })
            .collect()
    }

    /// Quadrature pairing of two sampled functions.
    pub fn pair(&self, f: &[f64], g: &[f64]) -> f64 {
        self.x_weights
            .par_iter()
            .enumerate()
            .map(|(i, wx)| {
                let row = i * self.n_y;
                wx * self.y_weights.iter().enumerate().map(|(j, wy)| wy * f[row + j] * g[row + j]).sum::<f64>()
            })
            .sum()
    }
}

/// `∫∫_D f g dx dy`.
pub fn inner_product(f: &SymFunction, g: &SymFunction, grid: &QuadratureGrid, p: &ModelParams) -> Result<f64> {
    check_evaluable(f, p)?;
    check_evaluable(g, p)?;
    Ok(grid.pair(&grid.sample(f, p), &grid.sample(g, p)))
}

fn check_evaluable(f: &SymFunction, p: &ModelParams) -> Result<()> {
    // Grid nodes avoid x = 0, so a probe at an interior point surfaces evaluation errors.
    f.evaluate(0.5 / p.q_f64(), 0.1 / p.q_f64(), p.q_f64(), p.k_f64()).map(|_| ())
}

pub fn norm(f: &SymFunction, grid: &QuadratureGrid, p: &ModelParams) -> Result<f64> {
    Ok(inner_product(f, f, grid, p)?.sqrt())
}

/// Sampled values of `f / ‖f‖` and the norm.
pub fn normalize(f: &SymFunction, grid: &QuadratureGrid, p: &ModelParams) -> Result<(Vec<f64>, f64)> {
    check_evaluable(f, p)?;
    let v = grid.sample(f, p);
    let nrm = grid.pair(&v, &v).sqrt();
    if nrm == 0.0 {
        return Err(Error::ParamOutOfRange("cannot normalize the zero function".into()));
    }
    Ok((v.iter().map(|x| x / nrm).collect(), nrm))
}

/// `‖A f − λ f‖ / ‖f‖` in the grid norm.
pub fn eigencheck(
    f: &SymFunction,
    a: &DiffOperator,
    lambda: f64,
    grid: &QuadratureGrid,
    p: &ModelParams,
) -> Result<f64> {
    let af = grid.sample(&a.apply(f), p);
    let fv = grid.sample(f, p);
    let diff: Vec<f64> = af.iter().zip(&fv).map(|(x, y)| x - lambda * y).collect();
    Ok((grid.pair(&diff, &diff) / grid.pair(&fv, &fv)).sqrt())
}

/// Exact test that `A f − λ f` canonicalizes to zero.
pub fn eigencheck_symbolic(f: &SymFunction, a: &DiffOperator, lambda: &Poly) -> bool {
    (&a.apply(f) - &f.scale(lambda)).is_zero()
}

/// Matrix of an operator in the normalized first basis of one level.
#[derive(Clone, Debug)]
pub struct DegenerateBlock {
    pub level: u32,
    pub basis: Vec<FirstBasisLabel>,
    pub operator: String,
    pub matrix: DMatrix<f64>,
}

impl DegenerateBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Largest `|M − Mᵀ|` entry relative to the largest `|M|` entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.matrix.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.transpose()).iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    pub fn report(&self) -> BlockReport {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        BlockReport {
            level: self.level,
            operator: self.operator.clone(),
            basis: self.basis.clone(),
            matrix: self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
            eigenvalues,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    #[serde(rename = "N")]
    pub level: u32,
    pub operator: String,
    pub basis: Vec<FirstBasisLabel>,
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

/// Normalized samples of the first-basis members of a level.
struct LevelSamples {
    basis: Vec<FirstBasisLabel>,
    functions: Vec<SymFunction>,
    normalized: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

fn level_samples(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<LevelSamples> {
    let basis = FirstBasisLabel::level_members(level);
    let functions: Vec<SymFunction> = basis.iter().map(|&b| psi_first_basis(b, p)).collect();
    let (normalized, norms) =
        functions.iter().map(|f| normalize(f, grid, p)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(LevelSamples { basis, functions, normalized, norms })
}

impl LevelSamples {
    /// `M_ij = ⟨ψ̂_i, A ψ̂_j⟩`.
    fn block(&self, a: &DiffOperator, grid: &QuadratureGrid, p: &ModelParams) -> DMatrix<f64> {
        let applied: Vec<Vec<f64>> = self
            .functions
            .par_iter()
            .zip(&self.norms)
            .map(|(f, nrm)| grid.sample(&a.apply(f), p).into_iter().map(|v| v / nrm).collect())
            .collect();
        let d = self.basis.len();
        DMatrix::from_fn(d, d, |i, j| grid.pair(&self.normalized[i], &applied[j]))
    }

    fn overlap(&self, grid: &QuadratureGrid) -> DMatrix<f64> {
        let d = self.basis.len();
        DMatrix::from_fn(d, d, |i, j| grid.pair(&self.normalized[i], &self.normalized[j]))
    }
}

pub fn degenerate_block(
    level: u32,
    a: &DiffOperator,
    name: &str,
    grid: &QuadratureGrid,
    p: &ModelParams,
) -> Result<DegenerateBlock> {
    let s = level_samples(level, grid, p)?;
    debug_assert_eq!(s.basis.len() as u32, degeneracy(level));
    let matrix = s.block(a, grid, p);
    Ok(DegenerateBlock { level, basis: s.basis, operator: name.to_string(), matrix })
}

/// Gram matrix of the normalized first basis of one level.
pub fn overlap_matrix(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<DMatrix<f64>> {
    Ok(level_samples(level, grid, p)?.overlap(grid))
}

/// Second basis of a level as eigenvectors of the `R` block.
#[derive(Clone, Debug)]
pub struct SecondBasis {
    pub level: u32,
    pub basis: Vec<FirstBasisLabel>,
    pub labels: Vec<SecondBasisLabel>,
    /// Column `i` expands the member with `ν = labels[i].nu`.
    pub z: DMatrix<f64>,
    pub r_eigenvalues: Vec<f64>,
}

const R_MATCH_TOL: f64 = 1e-7;

pub fn construct_second_basis(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<SecondBasis> {
    let s = level_samples(level, grid, p)?;
    let r = build_operator(OperatorName::R, p)?;
    second_basis_from(level, &s, &s.block(&r, grid, p), p)
}

fn second_basis_from(level: u32, s: &LevelSamples, r_block: &DMatrix<f64>, p: &ModelParams) -> Result<SecondBasis> {
    let sym = (r_block + r_block.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let d = s.basis.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let r_eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    for w in r_eigenvalues.windows(2) {
        if (w[1] - w[0]).abs() <= R_MATCH_TOL * w[1].abs().max(1.0) {
            return Err(Error::DegenerateRSpectrum { first: w[0], second: w[1] });
        }
    }
    let mut z = DMatrix::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // basis[0] is the largest-l member
        if v[0] < 0.0 {
            v = -v;
        }
        z.set_column(col, &v);
    }
    let labels = (0..d as u32).map(|i| SecondBasisLabel { level, nu: level % 2 + 2 * i }).collect::<Vec<_>>();
    let scale = rat_to_f64(&r_eigenvalue(level, p)).max(1.0);
    for (lab, got) in labels.iter().zip(&r_eigenvalues) {
        let want = rat_to_f64(&r_eigenvalue(lab.nu, p));
        if (got - want).abs() > R_MATCH_TOL * scale {
            return Err(Error::ParamOutOfRange(format!(
                "R eigenvalue {got} at nu = {} does not match r_nu = {want}",
                lab.nu
            )));
        }
    }
    Ok(SecondBasis { level, basis: s.basis.clone(), labels, z, r_eigenvalues })
}

/// `L` in the numerically constructed second basis.
#[derive(Clone, Debug, Serialize)]
pub struct LMatrixNumeric {
    #[serde(rename = "N")]
    pub level: u32,
    pub nus: Vec<u32>,
    pub diagonal: Vec<f64>,
    /// `off_diagonal[i]` couples `nus[i]` and `nus[i+1]`.
    pub off_diagonal: Vec<f64>,
    /// Measured `s_ν` at `nus[i+1]`.
    pub phases: Vec<i8>,
    /// Largest entry beyond the first off-diagonal.
    pub beyond_tridiagonal: f64,
    pub matrix: Vec<Vec<f64>>,
}

impl LMatrixNumeric {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.nus.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.matrix[i][j]);
        let sym = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

pub fn l_matrix_numeric(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<LMatrixNumeric> {
    let s = level_samples(level, grid, p)?;
    let r = build_operator(OperatorName::R, p)?;
    let l = build_operator(OperatorName::L, p)?;
    let (r_block, l_block) = rayon::join(|| s.block(&r, grid, p), || s.block(&l, grid, p));
    let sb = second_basis_from(level, &s, &r_block, p)?;
    let m = sb.z.transpose() * l_block * &sb.z;
    let d = sb.labels.len();
    let mut beyond = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i.abs_diff(j) > 1 {
                beyond = beyond.max(m[(i, j)].abs());
            }
        }
    }
    let off_diagonal: Vec<f64> = (1..d).map(|i| 0.5 * (m[(i - 1, i)] + m[(i, i - 1)])).collect();
    Ok(LMatrixNumeric {
        level,
        nus: sb.labels.iter().map(|l| l.nu).collect(),
        diagonal: (0..d).map(|i| m[(i, i)]).collect(),
        phases: off_diagonal.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect(),
        off_diagonal,
        beyond_tridiagonal: beyond,
        matrix: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
    })
}

/// Relative phases of `L` off-diagonals in two conventions.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseMeasurement {
    #[serde(rename = "N")]
    pub level: u32,
    pub nus: Vec<u32>,
    /// Signs of `⟨Ψ_{ν−2}|L|Ψ_ν⟩` with eigenvectors phased by their largest-`l` component.
    pub eigenvector_convention: Vec<i8>,
    /// Sign of each eigenvector relative to the ladder-built state with the same `ν`.
    pub ladder_overlap_signs: Vec<i8>,
    /// `s_ν` for `Ψ_{N,N−ν} ∝ η^{(k)†} ⋯ η^{(k+ν−1)†} Ψ^{(k+ν)}_{N−ν,N−ν}`.
    pub ladder_convention: Vec<i8>,
}

fn lowered(p: &ModelParams) -> Result<ModelParams> {
    ModelParams::new(p.q.clone(), &p.k - BigRational::one())
}

/// Samples of the ladder-built `Ψ_{N,N−ν}`. The seed is the `ν = 0` member of
/// level `N − ν` at `k + ν`, phased by its largest-`l` component.
fn ladder_state(level: u32, nu: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<Vec<f64>> {
    let pk = (0..nu).fold(p.clone(), |acc, _| acc.shifted());
    let seed = construct_second_basis(level - nu, grid, &pk)?;
    let mut acc = vec![0.0; grid.len()];
    for (i, lab) in seed.basis.iter().enumerate() {
        let mut f = psi_first_basis(*lab, &pk);
        let nrm = norm(&f, grid, &pk)?;
        let mut pj = pk.clone();
        for _ in 0..nu {
            pj = lowered(&pj)?;
            f = build_operator(OperatorName::EtaDag, &pj)?.apply(&f);
        }
        let c = seed.z[(i, 0)] / nrm;
        for (a, v) in acc.iter_mut().zip(grid.sample(&f, p)) {
            *a += c * v;
        }
    }
    Ok(acc)
}

pub fn measure_phases(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<PhaseMeasurement> {
    let lm = l_matrix_numeric(level, grid, p)?;
    let s = level_samples(level, grid, p)?;
    let r = build_operator(OperatorName::R, p)?;
    let sb = second_basis_from(level, &s, &s.block(&r, grid, p), p)?;
    let signs = sb
        .labels
        .par_iter()
        .enumerate()
        .map(|(c, lab)| {
            let mut z = vec![0.0; grid.len()];
            for (i, v) in s.normalized.iter().enumerate() {
                for (a, x) in z.iter_mut().zip(v) {
                    *a += sb.z[(i, c)] * x;
                }
            }
            let ov = grid.pair(&ladder_state(level, lab.nu, grid, p)?, &z);
            Ok(if ov < 0.0 { -1 } else { 1 })
        })
        .collect::<Result<Vec<i8>>>()?;
    let ladder = lm.phases.iter().enumerate().map(|(i, s)| s * signs[i] * signs[i + 1]).collect();
    Ok(PhaseMeasurement {
        level,
        nus: lm.nus.clone(),
        eigenvector_convention: lm.phases,
        ladder_overlap_signs: signs,
        ladder_convention: ladder,
    })
}

/// `|⟨f, C g⟩ + ⟨C f, g⟩| / (‖f‖‖C g‖ + ‖C f‖‖g‖)`; zero when `C† = −C`
/// on functions that satisfy the boundary conditions.
pub fn antisymmetry_residual(
    c: &DiffOperator,
    f: &SymFunction,
    g: &SymFunction,
    grid: &QuadratureGrid,
    p: &ModelParams,
) -> Result<f64> {
    check_evaluable(f, p)?;
    check_evaluable(g, p)?;
    let (fv, gv) = (grid.sample(f, p), grid.sample(g, p));
    let (cf, cg) = (grid.sample(&c.apply(f), p), grid.sample(&c.apply(g), p));
    let n = |v: &[f64]| grid.pair(v, v).sqrt();
    let scale = n(&fv) * n(&cg) + n(&cf) * n(&gv);
    Ok((grid.pair(&fv, &cg) + grid.pair(&cf, &gv)).abs() / scale)
}

/// `‖η Ψ_{N,N}‖²` for the `ν = 0` member of a level, built from the
/// numerically constructed second basis.
pub fn eta_norm_sq_ground(level: u32, grid: &QuadratureGrid, p: &ModelParams) -> Result<f64> {
    let s = level_samples(level, grid, p)?;
    let r = build_operator(OperatorName::R, p)?;
    let sb = second_basis_from(level, &s, &s.block(&r, grid, p), p)?;
    let eta = build_operator(OperatorName::Eta, p)?;
    let mut acc = vec![0.0; grid.len()];
    for (i, f) in s.functions.iter().enumerate() {
        let coef = sb.z[(i, 0)] / s.norms[i];
        for (a, v) in acc.iter_mut().zip(grid.sample(&eta.apply(f), p)) {
            *a += coef * v;
        }
    }
    Ok(grid.pair(&acc, &acc))
}

/// Symbolic eigen-equation `H ψ = E_N ψ` and `L ψ = (l+1)² q² ψ` for a member.
pub fn first_basis_eigencheck_symbolic(label: FirstBasisLabel, p: &ModelParams) -> Result<(bool, bool)> {
    let psi = psi_first_basis(label, p);
    let h = build_operator(OperatorName::H, p)?;
    let l = build_operator(OperatorName::L, p)?;
    let e = energy_poly(label.level()).fix_k(&p.k);
    let l_val = Poly::q_pow(2).scale(&(l_eigenvalue(label.l, p) / (&p.q * &p.q)));
    Ok((eigencheck_symbolic(&psi, &h, &e), eigencheck_symbolic(&psi, &l, &l_val)))
}

/// `(x, y, f(x, y))` on a regular grid over `(0, x_max] × [−π/(2q), π/(2q)]`.
pub fn sample_points(f: &SymFunction, p: &ModelParams, n_x: usize, n_y: usize, x_max: f64) -> Vec<(f64, f64, f64)> {
    let compiled = f.compile(p.q_f64(), p.k_f64());
    let edge = std::f64::consts::FRAC_PI_2 / p.q_f64();
    let mut out = Vec::with_capacity(n_x * n_y);
    for i in 1..=n_x {
        let x = x_max * i as f64 / n_x as f64;
        for j in 0..n_y {
            let y = if n_y == 1 { 0.0 } else { -edge + 2.0 * edge * j as f64 / (n_y - 1) as f64 };
            out.push((x, y, compiled.eval(&TrigPoint::from_xy(x, y, p.q_f64()))));
        }
    }
    out
}

/// Writes [`sample_points`] as CSV with columns `x, y, value`.
pub fn sample_csv<W: std::io::Write>(
    f: &SymFunction,
    p: &ModelParams,
    n_x: usize,
    n_y: usize,
    x_max: f64,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: String| Error::ParamOutOfRange(format!("csv output failed: {e}"));
    w.write_record(["x", "y", "value"]).map_err(|e| io(e.to_string()))?;
    for row in sample_points(f, p, n_x, n_y, x_max) {
        w.serialize(row).map_err(|e| io(e.to_string()))?;
    }
    w.flush().map_err(|e| io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(qn: i64, kn: i64, kd: i64) -> ModelParams {
        ModelParams::from_ratios(qn, 1, kn, kd).unwrap()
    }

    #[test]
    fn jacobi_basics() {
        assert_eq!(jacobi_poly(0, 0.3, 1.0, 0.2).unwrap(), 1.0);
        assert!(jacobi_poly(2, -1.0, 1.0, 0.2).is_err());
        // P_1^{(a,b)}(1) = a + 1
        assert!((jacobi_poly(1, 0.5, 2.0, 1.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn ground_state_eigencheck() {
        let pp = p(1, 1, 1);
        let (h_ok, l_ok) = first_basis_eigencheck_symbolic(FirstBasisLabel { n: 0, l: 0 }, &pp).unwrap();
        assert!(h_ok && l_ok);
    }

    #[test]
    fn boundary_of_ground_state_and_partner() {
        let pp = p(1, 1, 2);
        let psi = psi_first_basis(FirstBasisLabel { n: 0, l: 0 }, &pp);
        assert!(boundary_check(&psi, &pp.k).unwrap().physical());
        let bad = psi_unphysical(FirstBasisLabel { n: 0, l: 0 }, &pp);
        let b = boundary_check(&bad, &pp.k).unwrap();
        assert!(b.vanishes_at_x0 && !b.vanishes_at_y_edges);
    }

    #[test]
    fn sech2_integral() {
        let g = QuadratureGrid::new(DEFAULT_NX, DEFAULT_NY, 2.0).unwrap();
        assert!((g.integrate_sech2() - std::f64::consts::PI / 4.0).abs() < 1e-12);
        assert!(g.x_weights.iter().chain(&g.y_weights).all(|w| *w > 0.0));
    }
}
