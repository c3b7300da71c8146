use num_rational::BigRational;
use serde::Serialize;

use semilayer::algebra_verify::full_report;
use semilayer::classical_limit::{classical_algebra_check_with, ClassicalParams};
use semilayer::model::{degeneracy, energy, ModelParams, Mutation};
use semilayer::parafermion_rep::{
    l_tridiagonal_with, level_report, physical_filter, physical_filter_symbolic, solve_representations,
    solve_representations_symbolic, Parity,
};
use semilayer::poly::{fmt_rational, parse_rational, rat_to_f64};
use semilayer::report::{Status, VerificationReport};
use semilayer::wavefn_numerics::{
    boundary_check, l_matrix_numeric, measure_phases, overlap_matrix, psi_first_basis, sample_points, FirstBasisLabel,
    QuadratureGrid,
};

use crate::output::{CliError, Outcome};
use crate::Common;

const OVERLAP_TOL: f64 = 1e-8;
const ELEMENT_TOL: f64 = 1e-6;
const TRIDIAGONAL_TOL: f64 = 1e-7;

fn rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Config(format!("--{name}: `{s}` is not a rational number")))
}

fn params(c: &Common) -> Result<ModelParams, CliError> {
    ModelParams::new(rational("q", &c.q)?, rational("k", &c.k)?).map_err(|e| CliError::Config(e.to_string()))
}

fn grid(c: &Common, p: &ModelParams) -> Result<QuadratureGrid, CliError> {
    let bad = || CliError::Config(format!("--grid: expected NXxNY with both at least 16, got `{}`", c.grid));
    let (nx, ny) = c.grid.split_once('x').ok_or_else(bad)?;
    let (nx, ny): (usize, usize) = (nx.trim().parse().map_err(|_| bad())?, ny.trim().parse().map_err(|_| bad())?);
    if nx < 16 || ny < 16 {
        return Err(bad());
    }
    Ok(QuadratureGrid::new(nx, ny, p.q_f64())?)
}

fn report_outcome(report: &VerificationReport) -> Outcome {
    let rows = report
        .entries
        .iter()
        .map(|e| {
            let status = if e.status == Status::Pass { "pass" } else { "fail" };
            vec![e.identity.clone(), status.to_string(), e.residual_terms.to_string()]
        })
        .collect();
    let failures = report.failures().map(|e| e.identity.clone()).collect();
    Outcome::new(&report.entries, &["identity", "status", "residual_terms"], rows, failures)
}

pub fn verify_algebra(c: &Common) -> Result<Outcome, CliError> {
    let p = params(c)?;
    Ok(report_outcome(&full_report(&p, c.mutate)?))
}

pub fn verify_classical(c: &Common) -> Result<Outcome, CliError> {
    let cp = ClassicalParams::new(rational("q", &c.q)?, rational("k", &c.k)?)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(report_outcome(&classical_algebra_check_with(&cp, c.mutate)?))
}

#[derive(Serialize)]
struct SpectrumRow {
    #[serde(rename = "N")]
    level: u32,
    #[serde(rename = "E")]
    energy: String,
    #[serde(rename = "E_float")]
    energy_f64: f64,
    degeneracy: u32,
    /// Physical representation solutions reproducing this level (exact and symbolic).
    representation: &'static str,
}

/// Confirms `E_N` through the truncation conditions, once at the given `k`
/// and once with `k` symbolic.
fn representation_confirms(level: u32, p: &ModelParams) -> bool {
    let parity = Parity::of_level(level);
    let order = level / 2;
    let kept = physical_filter(solve_representations(order, p), p);
    let Some(sol) = kept.iter().find(|s| s.parity == parity) else {
        return false;
    };
    // one physical solution per parity, and both are upper-branch
    let numeric = kept.len() == 2 && sol.level == Some(level) && sol.params.energy == energy(level, p);
    let symbolic = physical_filter_symbolic(&solve_representations_symbolic(order))
        .iter()
        .any(|(s, n)| *n == level && s.parity == parity);
    numeric && symbolic
}

pub fn spectrum(c: &Common, nmax: u32) -> Result<Outcome, CliError> {
    let p = params(c)?;
    let levels: Vec<SpectrumRow> = (0..=nmax)
        .map(|n| {
            let e = energy(n, &p);
            SpectrumRow {
                level: n,
                energy: fmt_rational(&e),
                energy_f64: rat_to_f64(&e),
                degeneracy: degeneracy(n),
                representation: if representation_confirms(n, &p) { "pass" } else { "fail" },
            }
        })
        .collect();
    let rows = levels
        .iter()
        .map(|r| vec![r.level.to_string(), r.energy.clone(), r.degeneracy.to_string(), r.representation.to_string()])
        .collect();
    let failures = levels
        .iter()
        .filter(|r| r.representation == "fail")
        .map(|r| format!("N={}: physical representation reproduces E_N", r.level))
        .collect();
    Ok(Outcome::new(&levels, &["N", "E", "deg", "representation"], rows, failures))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn rep_table(c: &Common, nmax: u32) -> Result<Outcome, CliError> {
    let p = params(c)?;
    let reports = (0..=nmax).map(|n| level_report(n, &p, c.mutate)).collect::<Result<Vec<_>, _>>()?;
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.level.to_string(),
                r.energy.clone(),
                r.p.to_string(),
                r.parity.to_string(),
                r.u.clone(),
                join(&r.a_eigenvalues),
                join(&r.sigma),
                join(&r.tau_sq),
                join(&r.phases),
                r.eigencheck.to_string(),
            ]
        })
        .collect();
    let failures = reports
        .iter()
        .filter(|r| r.eigencheck != "pass")
        .map(|r| format!("N={}: L eigenvalues and trace", r.level))
        .collect();
    Ok(Outcome::new(
        &reports,
        &["N", "E", "p", "parity", "u", "A", "sigma", "tau_sq", "phases", "eigencheck"],
        rows,
        failures,
    ))
}

#[derive(Serialize)]
struct LMatrixReport {
    #[serde(rename = "N")]
    level: u32,
    q: String,
    k: String,
    nu: Vec<u32>,
    sigma: Vec<String>,
    tau_sq: Vec<String>,
    tau_abs: Vec<f64>,
    phases: Vec<i8>,
    eigenvalues: Vec<String>,
    characteristic_polynomial: &'static str,
    trace_identity: &'static str,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

pub fn l_matrix(c: &Common, level: u32) -> Result<Outcome, CliError> {
    let p = params(c)?;
    let lt = l_tridiagonal_with(level, &p, None, c.mutate)?;
    let (charpoly, trace) = (lt.eigenvalues_exact(), lt.trace_identity());
    let rep = LMatrixReport {
        level,
        q: fmt_rational(&p.q),
        k: fmt_rational(&p.k),
        nu: lt.nus.clone(),
        sigma: lt.sigma.iter().map(fmt_rational).collect(),
        tau_sq: lt.tau_sq.iter().map(fmt_rational).collect(),
        tau_abs: lt.tau_sq.iter().map(|t| rat_to_f64(t).sqrt()).collect(),
        phases: lt.phases.clone(),
        eigenvalues: lt.expected_eigenvalues().iter().map(fmt_rational).collect(),
        characteristic_polynomial: verdict(charpoly),
        trace_identity: verdict(trace),
    };
    let rows = (0..lt.dim())
        .map(|i| {
            let (t, s) = if i == 0 {
                (String::new(), String::new())
            } else {
                (rep.tau_sq[i - 1].clone(), rep.phases[i - 1].to_string())
            };
            vec![rep.nu[i].to_string(), rep.sigma[i].clone(), t, s, rep.eigenvalues[i].clone()]
        })
        .collect();
    let mut failures = Vec::new();
    if !charpoly {
        failures.push(format!("N={level}: det(L - lambda) = prod(q^2 (l+1)^2 - lambda)"));
    }
    if !trace {
        failures.push(format!("N={level}: sum sigma = q^2 sum (l+1)^2"));
    }
    Ok(Outcome::new(&rep, &["nu", "sigma", "tau_sq (to previous nu)", "phase", "eigenvalue"], rows, failures))
}

#[derive(Serialize)]
struct CrosscheckLevel {
    #[serde(rename = "N")]
    level: u32,
    overlap_max_deviation: f64,
    sigma_numeric: Vec<f64>,
    sigma_exact: Vec<f64>,
    tau_abs_numeric: Vec<f64>,
    tau_abs_exact: Vec<f64>,
    max_relative_deviation: f64,
    beyond_tridiagonal: f64,
    phases_eigenvector_convention: Vec<i8>,
    phases_ladder_convention: Vec<i8>,
    phases_closed_form: Vec<i8>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn crosscheck_level(
    level: u32,
    g: &QuadratureGrid,
    p: &ModelParams,
    mutation: Mutation,
) -> Result<CrosscheckLevel, CliError> {
    let o = overlap_matrix(level, g, p)?;
    let d = o.nrows();
    let overlap_dev = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (o[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let num = l_matrix_numeric(level, g, p)?;
    let lt = l_tridiagonal_with(level, p, None, mutation)?;
    let sigma_exact: Vec<f64> = lt.sigma.iter().map(rat_to_f64).collect();
    let tau_exact: Vec<f64> = lt.tau_sq.iter().map(|t| rat_to_f64(t).sqrt()).collect();
    let tau_num: Vec<f64> = num.off_diagonal.iter().map(|t| t.abs()).collect();
    let dev = num
        .diagonal
        .iter()
        .zip(&sigma_exact)
        .chain(tau_num.iter().zip(&tau_exact))
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    let ph = measure_phases(level, g, p)?;
    Ok(CrosscheckLevel {
        level,
        overlap_max_deviation: overlap_dev,
        sigma_numeric: num.diagonal,
        sigma_exact,
        tau_abs_numeric: tau_num,
        tau_abs_exact: tau_exact,
        max_relative_deviation: dev,
        beyond_tridiagonal: num.beyond_tridiagonal,
        phases_eigenvector_convention: ph.eigenvector_convention,
        phases_ladder_convention: ph.ladder_convention,
        phases_closed_form: lt.phases,
    })
}

pub fn crosscheck(c: &Common, nmax: u32) -> Result<Outcome, CliError> {
    let p = params(c)?;
    let g = grid(c, &p)?;
    let mut levels = Vec::new();
    let mut failures = Vec::new();
    for n in 0..=nmax {
        match crosscheck_level(n, &g, &p, c.mutate) {
            Ok(l) => {
                if l.overlap_max_deviation > OVERLAP_TOL {
                    failures.push(format!("N={n}: first-basis orthonormality"));
                }
                if l.max_relative_deviation > ELEMENT_TOL {
                    failures.push(format!("N={n}: numeric sigma/|tau| match closed forms"));
                }
                if l.beyond_tridiagonal > TRIDIAGONAL_TOL {
                    failures.push(format!("N={n}: L is tridiagonal in the second basis"));
                }
                if l.phases_ladder_convention != l.phases_closed_form {
                    failures.push(format!("N={n}: measured phases match the closed-form convention"));
                }
                levels.push(l);
            }
            Err(CliError::Core(e)) => failures.push(format!("N={n}: {e}")),
            Err(e) => return Err(e),
        }
    }
    let f = |v: f64| format!("{v:.3e}");
    let rows = levels
        .iter()
        .map(|l| {
            vec![
                l.level.to_string(),
                f(l.overlap_max_deviation),
                f(l.max_relative_deviation),
                f(l.beyond_tridiagonal),
                join(&l.phases_eigenvector_convention),
                join(&l.phases_ladder_convention),
            ]
        })
        .collect();
    Ok(Outcome::new(
        &levels,
        &["N", "overlap_dev", "element_dev", "beyond_tridiag", "phases(eigvec)", "phases(ladder)"],
        rows,
        failures,
    ))
}

#[derive(Serialize)]
struct SamplePoint {
    x: f64,
    y: f64,
    value: f64,
}

pub fn sample_psi(c: &Common, n: u32, l: u32, nx: usize, ny: usize, xmax: f64) -> Result<Outcome, CliError> {
    let p = params(c)?;
    if nx == 0 || ny == 0 || !(xmax > 0.0) {
        return Err(CliError::Config("sample-psi needs nx, ny >= 1 and xmax > 0".into()));
    }
    let psi = psi_first_basis(FirstBasisLabel { n, l }, &p);
    let bc = boundary_check(&psi, &p.k)?;
    let pts: Vec<SamplePoint> =
        sample_points(&psi, &p, nx, ny, xmax).into_iter().map(|(x, y, psi)| SamplePoint { x, y, value: psi }).collect();
    let rows = pts.iter().map(|s| vec![s.x.to_string(), s.y.to_string(), s.value.to_string()]).collect();
    let failures = if bc.physical() { vec![] } else { vec![format!("psi_{{{n},{l}}} boundary conditions")] };
    Ok(Outcome::new(&pts, &["x", "y", "value"], rows, failures))
}
