//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semilayer::algebra_verify::{
    casimir_check, casimir_operator, first_order_algebra_check, fit_casimir, full_report, operator_identity_check,
    quadratic_algebra_check_with, AlgebraCoefficients, CasimirPolynomial, HPowers,
};
use semilayer::classical_limit::{classical_algebra_check, classical_algebra_check_with, ClassicalParams};
use semilayer::model::{
    build_operator, degeneracy, energy, energy_poly, r_eigenvalue, ModelParams, Mutation, OperatorName,
};
use semilayer::parafermion_rep::{
    fock_contract, l_tridiagonal, l_tridiagonal_with, measure_normalization_ratio, phi_factorized, phi_general, phi_nu,
    phi_sequence, physical_filter, physical_filter_symbolic, solve_representations, solve_representations_symbolic,
    Branch, StructureFunctionParams,
};
use semilayer::poly::{rat, rat_int, rat_to_f64, Poly};
use semilayer::wavefn_numerics::{
    construct_second_basis, eigencheck, first_basis_eigencheck_symbolic, l_matrix_numeric, measure_phases,
    overlap_matrix, psi_first_basis, FirstBasisLabel, QuadratureGrid, DEFAULT_NX, DEFAULT_NY,
};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pt(qn: i64, qd: i64, kn: i64, kd: i64) -> ModelParams {
    ModelParams::from_ratios(qn, qd, kn, kd).unwrap()
}

/// The four parameter points of the identity suites.
fn identity_points() -> Vec<ModelParams> {
    vec![pt(1, 1, 1, 1), pt(1, 1, 1, 2), pt(2, 1, 3, 2), pt(1, 1, 3, 1)]
}

const K_GRID: [(i64, i64); 5] = [(1, 2), (1, 1), (3, 2), (2, 1), (5, 2)];

fn criterion_1() -> Check {
    for p in identity_points() {
        let mut r = first_order_algebra_check(&p).map_err(err)?;
        ensure(r.len() >= 9, format!("only {} first-order relations", r.len()))?;
        r.extend(operator_identity_check(&p).map_err(err)?);
        let fails: Vec<_> = r.failures().map(|e| e.identity.clone()).collect();
        ensure(fails.is_empty(), format!("({p}): {fails:?}"))?;
        for id in [
            "[H, L] = 0",
            "[H, R] = 0",
            "[H, Rbar] = 0",
            "R = eta_dag eta",
            "Rbar = eta_bar_dag eta_bar",
            "H = L + R + Rbar + 2q^2k",
        ] {
            ensure(r.get(id).is_some(), format!("identity `{id}` missing"))?;
        }
    }
    Ok(())
}

fn criterion_2() -> Check {
    for p in identity_points() {
        let (co, r) = quadratic_algebra_check_with(&p, Mutation::None).map_err(err)?;
        ensure(r.all_pass(), format!("({p}): {:?}", r.failures().map(|e| &e.identity).collect::<Vec<_>>()))?;
        ensure(co.a.is_zero(), "a != 0")?;
        ensure(r.get("a = 0").is_some(), "a = 0 not reported")?;
        ensure(r.get("[A, [B, C]] = [B, [A, C]]").is_some(), "Jacobi identity not reported")?;
    }
    Ok(())
}

/// Operator test of `K = k0 + k1 H + k2 H² + k3 H³` for a given polynomial.
fn casimir_is(p: &ModelParams, poly: &CasimirPolynomial) -> Result<bool, String> {
    let k_op = casimir_operator(p, &AlgebraCoefficients::at(p), Mutation::None).map_err(err)?;
    let mut hp = HPowers::new(build_operator(OperatorName::H, p).map_err(err)?);
    let rhs = poly.fix_k(&p.k).as_hpoly().to_operator(&mut hp).map_err(err)?;
    Ok((&k_op - &rhs).is_zero())
}

fn criterion_3() -> Check {
    // k1 = 8q^6(10k - 6), the expansion of -4q^4 [2q^2(7k-6) - 3H](2q^2 k - H)
    let expected = CasimirPolynomial::expected();
    let q6 = Poly::q_pow(6).scale(&rat_int(8));
    ensure(expected.k1 == &q6 * &(&Poly::k().scale(&rat_int(10)) - &Poly::int(6)), "expected k1 polynomial")?;
    for p in identity_points() {
        casimir_check(&p).map_err(err)?;
        ensure(casimir_is(&p, &expected)?, format!("({p}): K differs from the product form"))?;
    }
    let fit = fit_casimir(&pt(1, 1, 1, 1), Mutation::None).map_err(err)?.ok_or("no fit of K in powers of H")?;
    ensure(fit == vec![rat_int(-16), rat_int(32), rat_int(-12), rat_int(0)], format!("fit at (1,1): {fit:?}"))?;
    // The variant with k1 = 8q^6(13k - 6) is not an identity.
    let mut variant = expected.clone();
    variant.k1 = &q6 * &(&Poly::k().scale(&rat_int(13)) - &Poly::int(6));
    for p in identity_points() {
        ensure(!casimir_is(&p, &variant)?, format!("({p}): 13k-6 variant unexpectedly holds"))?;
    }
    println!("    K(1,1) = -16 + 32 H - 12 H^2; 13k-6 variant rejected at all points");
    Ok(())
}

fn criterion_4() -> Check {
    let mut seen_lower = 0;
    for level in 0..=10u32 {
        let order = level / 2;
        let sols = solve_representations_symbolic(order);
        seen_lower += sols.iter().filter(|s| s.branch == Branch::Lower).count();
        let kept = physical_filter_symbolic(&sols);
        ensure(kept.iter().all(|(s, _)| s.branch == Branch::Upper), "a lower branch passed the symbolic filter")?;
        let hit = kept.iter().find(|(_, n)| *n == level).ok_or(format!("N={level}: no symbolic solution"))?;
        ensure(hit.0.energy == energy_poly(level), format!("N={level}: E != q^2(N+2)(N+2k+1)"))?;
        ensure(hit.0.order + 1 == degeneracy(level), format!("N={level}: representation dimension"))?;
        ensure(degeneracy(level) == FirstBasisLabel::level_members(level).len() as u32, "degeneracy count")?;
        for (kn, kd) in K_GRID {
            let p = pt(1, 1, kn, kd);
            let all = solve_representations(order, &p);
            let kept = physical_filter(all.clone(), &p);
            ensure(kept.iter().all(|s| s.params.branch == Branch::Upper), "lower branch accepted")?;
            ensure(
                kept.iter().any(|s| s.level == Some(level) && s.params.energy == energy(level, &p)),
                format!("N={level}, k={}: physical solution missing", p.k),
            )?;
        }
    }
    ensure(seen_lower == 22, "lower branches enumerated")?;
    Ok(())
}

fn criterion_5() -> Check {
    let lt = l_tridiagonal(4, &pt(1, 1, 1, 1), None).map_err(err)?;
    ensure(lt.sigma == vec![rat_int(10), rat(33, 2), rat(17, 2)], format!("sigma {:?}", lt.sigma))?;
    ensure(lt.tau_sq == vec![rat_int(90), rat(165, 4)], format!("tau^2 {:?}", lt.tau_sq))?;
    ensure(lt.expected_eigenvalues() == vec![rat_int(1), rat_int(9), rat_int(25)], "eigenvalue set")?;
    ensure(lt.eigenvalues_exact(), "N=4 characteristic polynomial")?;
    for (kn, kd) in K_GRID {
        for q in [(1, 1), (3, 2)] {
            let p = pt(q.0, q.1, kn, kd);
            for level in 0..=10 {
                let lt = l_tridiagonal(level, &p, None).map_err(err)?;
                ensure(lt.eigenvalues_exact(), format!("N={level} ({p}): eigenvalues"))?;
                ensure(lt.trace_identity(), format!("N={level} ({p}): trace"))?;
            }
        }
    }
    Ok(())
}

const ORTHO_TOL: f64 = 1e-8;
const EIG_NUMERIC_TOL: f64 = 1e-8;
const R_TOL: f64 = 1e-7;
const ELEMENT_TOL: f64 = 1e-6;

fn criterion_6() -> Check {
    for p in [pt(1, 1, 1, 1), pt(2, 1, 3, 2)] {
        let g = QuadratureGrid::default_for(&p).map_err(err)?;
        ensure(g.n_x == DEFAULT_NX && g.n_y == DEFAULT_NY && DEFAULT_NX == 200 && DEFAULT_NY == 64, "default grid")?;
        let h = build_operator(OperatorName::H, &p).map_err(err)?;
        let l = build_operator(OperatorName::L, &p).map_err(err)?;
        for level in 0..=6u32 {
            let o = overlap_matrix(level, &g, &p).map_err(err)?;
            let dev = (&o - nalgebra::DMatrix::<f64>::identity(o.nrows(), o.ncols())).abs().max();
            ensure(dev < ORTHO_TOL, format!("N={level}: orthonormality {dev:e}"))?;
            for lab in FirstBasisLabel::level_members(level) {
                let (hs, ls) = first_basis_eigencheck_symbolic(lab, &p).map_err(err)?;
                ensure(hs && ls, format!("{lab:?}: symbolic eigencheck"))?;
                let psi = psi_first_basis(lab, &p);
                let rh = eigencheck(&psi, &h, rat_to_f64(&energy(level, &p)), &g, &p).map_err(err)?;
                let lv = p.q_f64().powi(2) * ((lab.l + 1) as f64).powi(2);
                let rl = eigencheck(&psi, &l, lv, &g, &p).map_err(err)?;
                ensure(
                    rh < EIG_NUMERIC_TOL && rl < EIG_NUMERIC_TOL,
                    format!("{lab:?}: numeric residuals {rh:e} {rl:e}"),
                )?;
            }
            let sb = construct_second_basis(level, &g, &p).map_err(err)?;
            for (lab, got) in sb.labels.iter().zip(&sb.r_eigenvalues) {
                let want = rat_to_f64(&r_eigenvalue(lab.nu, &p));
                ensure(
                    (got - want).abs() <= R_TOL * want.abs().max(1.0),
                    format!("N={level}: r_{} = {got} vs {want}", lab.nu),
                )?;
            }
            let num = l_matrix_numeric(level, &g, &p).map_err(err)?;
            let lt = l_tridiagonal(level, &p, None).map_err(err)?;
            ensure(num.nus == lt.nus, format!("N={level}: nu ordering {:?} vs {:?}", num.nus, lt.nus))?;
            for (a, b) in num.diagonal.iter().zip(&lt.sigma) {
                let b = rat_to_f64(b);
                ensure((a - b).abs() <= ELEMENT_TOL * b.abs().max(1.0), format!("N={level}: sigma {a} vs {b}"))?;
            }
            for (a, b) in num.off_diagonal.iter().zip(&lt.tau_sq) {
                let b = rat_to_f64(b).sqrt();
                ensure((a.abs() - b).abs() <= ELEMENT_TOL * b.max(1.0), format!("N={level}: |tau| {a} vs {b}"))?;
            }
        }
        let ph = measure_phases(4, &g, &p).map_err(err)?;
        println!(
            "    ({p}) N=4 phases: ladder convention {:?}, eigenvector convention {:?}",
            ph.ladder_convention, ph.eigenvector_convention
        );
        ensure(ph.ladder_convention == vec![-1, -1], format!("s2, s4 = {:?}", ph.ladder_convention))?;
    }
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    let d = rng.gen_range(1..=12);
    rat(rng.gen_range(lo * d..=hi * d), d)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples = Vec::new();
    for _ in 0..3 {
        let q = loop {
            let v = random_rational(&mut rng, 0, 3);
            if v.is_positive() {
                break v;
            }
        };
        let k = loop {
            let v = random_rational(&mut rng, 0, 4);
            if v.is_positive() {
                break v;
            }
        };
        let p = ModelParams::new(q, k).map_err(err)?;
        let u = random_rational(&mut rng, 0, 3);
        let e = random_rational(&mut rng, 1, 80);
        let sp = StructureFunctionParams { u, energy: e, order: 2, branch: Branch::Upper };
        for _ in 0..25 {
            samples.push((random_rational(&mut rng, -4, 8), sp.clone(), p.clone()));
        }
    }
    let ratio = measure_normalization_ratio(&samples[..10]).map_err(err)?.ok_or("ratio not constant")?;
    println!("    measured normalization ratio phi_general / phi_factorized = {ratio}");
    for (x, sp, p) in &samples {
        let f = phi_factorized(x, sp, p).map_err(err)?;
        ensure(phi_general(x, sp, p) == &ratio * &f, format!("mismatch at x = {x} ({p})"))?;
    }
    for (kn, kd) in K_GRID {
        let p = pt(1, 1, kn, kd);
        for level in 0..=10u32 {
            for nu in (level % 2..=level).step_by(2) {
                let v = phi_nu(nu, level, &p).map_err(err)?;
                ensure(!v.is_negative(), format!("Phi_{nu} < 0 at N={level}"))?;
                ensure(v.is_zero() == (nu <= 1), format!("Phi_{nu} zero pattern at N={level}"))?;
            }
        }
        for level in 0..=11u32 {
            let phi = phi_sequence(level, &p).map_err(err)?;
            ensure(phi.len() - 1 <= 6, "Fock dimension")?;
            ensure(fock_contract(&phi), format!("Fock contract at N={level}, k={}", p.k))?;
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    for (qn, qd, kn, kd) in [(1, 1, 1, 1), (1, 1, 1, 2), (2, 1, 3, 2), (1, 1, 3, 1)] {
        let cp = ClassicalParams::from_ratios(qn, qd, kn, kd).map_err(err)?;
        let r = classical_algebra_check(&cp).map_err(err)?;
        ensure(r.all_pass(), format!("{:?}", r.failures().map(|e| &e.identity).collect::<Vec<_>>()))?;
        for id in ["{H_c, L_c} = 0", "{H_c, R_c} = 0", "{H_c, Rbar_c} = 0", "H_c = L_c + R_c + Rbar_c", "K_c = 0"] {
            ensure(r.get(id).is_some(), format!("`{id}` missing"))?;
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    let p = pt(1, 1, 1, 1);
    let suite = |m| -> Result<bool, String> { Ok(full_report(&p, m).map_err(err)?.all_pass()) };
    ensure(suite(Mutation::None)?, "unmutated algebra suite fails")?;
    ensure(!suite(Mutation::EtaBarSign)?, "eta-bar-sign not detected")?;
    ensure(!suite(Mutation::CasimirConstant)?, "casimir-constant not detected")?;
    let cp = ClassicalParams::from_ratios(1, 1, 1, 1).map_err(err)?;
    ensure(!classical_algebra_check_with(&cp, Mutation::EtaBarSign).map_err(err)?.all_pass(), "classical eta-bar")?;
    let sig = l_tridiagonal_with(4, &p, None, Mutation::SigmaCoefficient).map_err(err)?;
    ensure(!sig.eigenvalues_exact() && !sig.trace_identity(), "sigma-coefficient not detected")?;
    println!("    exit-code contract under mutation is exercised by the CLI tests");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Check, Option<Duration>); 9] = [
        (1, "operator identities", criterion_1, Some(Duration::from_secs(10))),
        (2, "quadratic algebra", criterion_2, Some(Duration::from_secs(60))),
        (3, "Casimir", criterion_3, None),
        (4, "spectrum from representations", criterion_4, None),
        (5, "L tridiagonal closed form", criterion_5, None),
        (6, "numeric cross-check", criterion_6, Some(Duration::from_secs(120))),
        (7, "structure functions", criterion_7, None),
        (8, "classical suite", criterion_8, Some(Duration::from_secs(10))),
        (9, "mutation controls", criterion_9, None),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let res = match (res, budget) {
            (Ok(()), Some(b)) if dt > b => Err(format!("runtime {dt:?} exceeds {b:?}")),
            (r, _) => r,
        };
        match res {
            Ok(()) => println!("criterion {id} ({name}): PASS [{:.2}s]", dt.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL [{:.2}s] {e}", dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
