use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use proptest::prelude::*;

use semilayer::algebra_verify::compute_c;
use semilayer::model::{build_operator, ModelParams, OperatorName};
use semilayer::wavefn_numerics::{
    antisymmetry_residual, boundary_check, degenerate_block, eta_norm_sq_ground, inner_product, jacobi_poly, norm,
    psi_first_basis, psi_unphysical, sample_csv, zero_mode, zero_mode_bar, FirstBasisLabel, QuadratureGrid,
};

fn p(qn: i64, qd: i64, kn: i64, kd: i64) -> ModelParams {
    ModelParams::from_ratios(qn, qd, kn, kd).unwrap()
}

fn binom(top: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (top - i as f64) / (i + 1) as f64)
}

const TOL: f64 = 1e-10;

#[test]
fn jacobi_orthogonality_by_quadrature() {
    let rule = GaussLegendre::new(NonZeroUsize::new(60).unwrap());
    for (a, b) in [(0.5, 1.0), (1.5, 3.0), (2.5, 2.0)] {
        // Half-integer `a` makes the weight non-polynomial; substitute t = 1 − 2s² on s ∈ (0, 1).
        let inner = |m: u32, n: u32| -> f64 {
            rule.iter()
                .map(|&(u, w)| {
                    let s = 0.5 * (u + 1.0);
                    let t = 1.0 - 2.0 * s * s;
                    let weight = (2.0 * s * s).powf(a) * (2.0 - 2.0 * s * s).powf(b) * 4.0 * s;
                    0.5 * w * weight * jacobi_poly(m, a, b, t).unwrap() * jacobi_poly(n, a, b, t).unwrap()
                })
                .sum()
        };
        for m in 0..5 {
            for n in 0..m {
                let scale = (inner(m, m) * inner(n, n)).sqrt();
                assert!(inner(m, n).abs() < 1e-10 * scale, "a={a}, b={b}, ({m},{n})");
            }
        }
    }
}

proptest! {
    #[test]
    fn jacobi_endpoints_are_binomials(n in 0u32..12, a in -0.9f64..6.0, b in -0.9f64..6.0) {
        let top = jacobi_poly(n, a, b, 1.0).unwrap();
        let bottom = jacobi_poly(n, a, b, -1.0).unwrap();
        let want_top = binom(n as f64 + a, n);
        let want_bottom = if n % 2 == 0 { 1.0 } else { -1.0 } * binom(n as f64 + b, n);
        prop_assert!((top - want_top).abs() <= 1e-9 * want_top.abs().max(1.0));
        prop_assert!((bottom - want_bottom).abs() <= 1e-9 * want_bottom.abs().max(1.0));
    }

    /// The binomial expansion of the first basis agrees with the Jacobi recurrence.
    #[test]
    fn first_basis_matches_jacobi_form(n in 0u32..5, l in 0u32..5, x in 0.05f64..3.0, y in -1.2f64..1.2) {
        let pp = p(5, 4, 3, 2);
        let (q, k) = (pp.q_f64(), pp.k_f64());
        let y = y / q;
        let t = (q * x).tanh();
        let sech = 1.0 / (q * x).cosh();
        let chi = if l % 2 == 0 { ((l + 1) as f64 * q * y).cos() } else { ((l + 1) as f64 * q * y).sin() };
        let want = t.powf(k) * sech.powi(l as i32 + 2) * jacobi_poly(n, k - 0.5, (l + 1) as f64, 1.0 - 2.0 * t * t).unwrap() * chi;
        let got = psi_first_basis(FirstBasisLabel { n, l }, &pp).evaluate(x, y, q, k).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn quadrature_reproduces_sech_squared_integral() {
    for q in [0.5, 1.0, 2.0] {
        let g = QuadratureGrid::new(120, 32, q).unwrap();
        assert!((g.integrate_sech2() - std::f64::consts::PI / (q * q)).abs() < TOL);
    }
}

#[test]
fn distinct_members_are_orthogonal() {
    let pp = p(1, 1, 1, 1);
    let g = QuadratureGrid::default_for(&pp).unwrap();
    let f = |n, l| psi_first_basis(FirstBasisLabel { n, l }, &pp);
    let pairs = [((0, 0), (0, 1)), ((0, 0), (1, 0)), ((1, 1), (0, 3)), ((0, 2), (1, 0))];
    for ((n1, l1), (n2, l2)) in pairs {
        let (a, b) = (f(n1, l1), f(n2, l2));
        let ip = inner_product(&a, &b, &g, &pp).unwrap() / (norm(&a, &g, &pp).unwrap() * norm(&b, &g, &pp).unwrap());
        assert!(ip.abs() < 1e-10, "({n1},{l1}) vs ({n2},{l2}): {ip}");
    }
}

#[test]
fn degenerate_blocks() {
    let pp = p(1, 1, 1, 1);
    let g = QuadratureGrid::default_for(&pp).unwrap();
    let r = build_operator(OperatorName::R, &pp).unwrap();
    let r0 = degenerate_block(0, &r, "R", &g, &pp).unwrap();
    assert_eq!(r0.dim(), 1);
    assert!(r0.matrix[(0, 0)].abs() < 1e-9);

    let l = build_operator(OperatorName::L, &pp).unwrap();
    let l4 = degenerate_block(4, &l, "L", &g, &pp).unwrap();
    let want = [25.0, 9.0, 1.0];
    for i in 0..3 {
        for j in 0..3 {
            let w = if i == j { want[i] } else { 0.0 };
            assert!((l4.matrix[(i, j)] - w).abs() < 1e-8, "L[{i},{j}] = {}", l4.matrix[(i, j)]);
        }
    }

    let r4 = degenerate_block(4, &r, "R", &g, &pp).unwrap();
    assert!(r4.is_symmetric(1e-9));
    // r_nu = nu(nu + 2) for nu = 0, 2, 4
    let eig = r4.report().eigenvalues;
    for (a, b) in eig.iter().zip([0.0, 8.0, 24.0]) {
        assert!((a - b).abs() < 1e-7, "{eig:?}");
    }
}

#[test]
fn boundary_conditions_select_the_physical_y_factor() {
    let pp = p(1, 1, 3, 2);
    for level in 0..5u32 {
        for lab in FirstBasisLabel::level_members(level) {
            assert!(boundary_check(&psi_first_basis(lab, &pp), &pp.k).unwrap().physical());
            let bad = boundary_check(&psi_unphysical(lab, &pp), &pp.k).unwrap();
            assert!(bad.vanishes_at_x0 && !bad.vanishes_at_y_edges, "{lab:?}");
        }
    }
}

#[test]
fn zero_modes_are_annihilated() {
    for pp in [p(1, 1, 1, 1), p(2, 1, 5, 2)] {
        let eta = build_operator(OperatorName::Eta, &pp).unwrap();
        let eta_bar = build_operator(OperatorName::EtaBar, &pp).unwrap();
        for s in 0..4 {
            assert!(eta.apply(&zero_mode(s, &pp)).is_zero(), "s={s}");
            assert!(eta_bar.apply(&zero_mode_bar(s, &pp)).is_zero(), "s={s}");
        }
    }
}

#[test]
fn c_is_antisymmetric_on_the_basis() {
    let pp = p(1, 1, 3, 2);
    let g = QuadratureGrid::default_for(&pp).unwrap();
    let c = compute_c(&pp).unwrap();
    let f = psi_first_basis(FirstBasisLabel { n: 0, l: 2 }, &pp);
    let h = psi_first_basis(FirstBasisLabel { n: 1, l: 0 }, &pp);
    let e = psi_first_basis(FirstBasisLabel { n: 1, l: 1 }, &pp);
    assert!(antisymmetry_residual(&c, &f, &h, &g, &pp).unwrap() < 1e-9);
    assert!(antisymmetry_residual(&c, &f, &e, &g, &pp).unwrap() < 1e-9);
}

#[test]
fn eta_annihilates_the_nu_zero_state() {
    let pp = p(1, 1, 1, 1);
    let g = QuadratureGrid::default_for(&pp).unwrap();
    for level in [0, 2, 4] {
        assert!(eta_norm_sq_ground(level, &g, &pp).unwrap() < 1e-9, "N={level}");
    }
}

#[test]
fn sample_csv_layout() {
    let pp = p(1, 1, 1, 1);
    let mut buf = Vec::new();
    sample_csv(&psi_first_basis(FirstBasisLabel { n: 0, l: 0 }, &pp), &pp, 4, 3, 2.0, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "x,y,value");
    assert_eq!(lines.len(), 1 + 4 * 3);
    // y = ±π/2 rows vanish
    let edge: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(edge.abs() < 1e-15);
}
