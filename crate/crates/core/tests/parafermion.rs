use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use semilayer::model::{energy, l_eigenvalue, ModelParams};
use semilayer::parafermion_rep::{
    a_eigenvalue, classify_representations, fock_contract, l_tridiagonal, nu_values, phi_branch, phi_factorized,
    phi_general, phi_nu, phi_sequence, rho_sq, sigma_general, sigma_nu, solve_representations, tau_nu_sq, Branch,
    Parity, StructureFunctionParams,
};
use semilayer::poly::{rat, rat_int};

fn p(qn: i64, qd: i64, kn: i64, kd: i64) -> ModelParams {
    ModelParams::from_ratios(qn, qd, kn, kd).unwrap()
}

fn params() -> impl Strategy<Value = ModelParams> {
    (1i64..=5, 1i64..=3, 1i64..=14, 1i64..=4).prop_map(|(a, b, c, d)| p(a, b, c, d))
}

fn phases(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
}

/// Characteristic polynomial of a symmetric tridiagonal matrix evaluated at `x`,
/// by the three-term recurrence on leading minors.
fn tridiagonal_det(diag: &[BigRational], off_sq: &[BigRational], x: &BigRational) -> BigRational {
    let (mut prev, mut cur) = (BigRational::from_integer(1.into()), x - &diag[0]);
    for i in 1..diag.len() {
        let next = (x - &diag[i]) * &cur - &off_sq[i - 1] * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn a_eigenvalues_at_unit_parameters() {
    let pp = p(1, 1, 1, 1);
    let even = Parity::Even.u(&pp.k);
    let got: Vec<_> = (0..4).map(|m| a_eigenvalue(m, &even, &pp)).collect();
    // q²(2m+2u−k)(2m+2u+k) with 2u = 1
    assert_eq!(got, [0, 8, 24, 48].map(rat_int).to_vec());
}

#[test]
fn l_diagonal_block_at_level_four() {
    let pp = p(1, 1, 1, 1);
    let want: Vec<_> = [4, 2, 0].iter().map(|&l| l_eigenvalue(l, &pp)).collect();
    assert_eq!(want, [25, 9, 1].map(rat_int).to_vec());
    let lt = l_tridiagonal(4, &pp, None).unwrap();
    assert_eq!(lt.expected_eigenvalues(), want.into_iter().rev().collect::<Vec<_>>());
}

#[test]
fn tau_squared_is_rho_squared_times_phi() {
    for pp in [p(1, 1, 3, 2), p(2, 1, 5, 2), p(1, 2, 7, 3)] {
        for level in 2..=10u32 {
            for nu in nu_values(level).into_iter().filter(|&v| v >= 2) {
                let w = (rat_int(nu as i64 - 2) + &pp.k) / rat_int(2);
                let want = rho_sq(&w, &pp) * phi_nu(nu, level, &pp).unwrap();
                assert_eq!(tau_nu_sq(nu, level, &pp).unwrap(), want, "N={level}, nu={nu}, {pp}");
            }
        }
    }
}

#[test]
fn lower_branch_never_physical() {
    for pp in [p(1, 1, 1, 2), p(1, 1, 1, 1), p(3, 2, 5, 2)] {
        for order in 0..5 {
            for s in classify_representations(order, &pp) {
                assert_eq!(s.physical, s.params.branch == Branch::Upper, "{pp}, order {order}");
            }
        }
    }
}

#[test]
fn upper_branch_energies_are_the_spectrum() {
    let pp = p(2, 1, 3, 2);
    for order in 0..6u32 {
        for s in solve_representations(order, &pp).into_iter().filter(|s| s.params.branch == Branch::Upper) {
            let level = 2 * order + s.parity.nu_offset();
            assert_eq!(s.params.energy, energy(level, &pp));
            assert_eq!(s.a_eigenvalues.len() as u32, order + 1);
        }
    }
}

#[test]
fn sigma_general_pole_is_reported() {
    let pp = p(1, 1, 1, 1);
    assert!(sigma_general(0, &Parity::Even.u(&pp.k), &energy(0, &pp), &pp).is_err());
}

proptest! {
    #[test]
    fn eigenvalues_independent_of_phase_choice(pp in params(), level in 0u32..10, ph in phases(5)) {
        let dim = (level / 2 + 1) as usize;
        let ph: Vec<i8> = ph.into_iter().take(dim - 1).collect();
        let lt = l_tridiagonal(level, &pp, Some(ph.clone())).unwrap();
        prop_assert!(lt.eigenvalues_exact());
        prop_assert!(lt.trace_identity());
        let base = l_tridiagonal(level, &pp, None).unwrap();
        prop_assert_eq!(&lt.sigma, &base.sigma);
        prop_assert_eq!(&lt.tau_sq, &base.tau_sq);
    }

    /// Each `(l+1)²q²` with `l ≡ N (mod 2)` is a root of the tridiagonal determinant.
    #[test]
    fn closed_form_spectrum_by_determinant(pp in params(), level in 0u32..12) {
        let lt = l_tridiagonal(level, &pp, None).unwrap();
        for l in nu_values(level) {
            let x = l_eigenvalue(l, &pp);
            prop_assert!(tridiagonal_det(&lt.sigma, &lt.tau_sq, &x).is_zero(), "l = {}", l);
        }
    }

    #[test]
    fn sigma_general_matches_closed_form(pp in params(), level in 0u32..12) {
        let parity = Parity::of_level(level);
        let u = parity.u(&pp.k);
        for nu in nu_values(level) {
            let m = (nu - parity.nu_offset()) / 2;
            let w = rat_int(m as i64) + &u;
            if &w * &w == rat(1, 4) {
                continue;
            }
            let g = sigma_general(m, &u, &energy(level, &pp), &pp).unwrap();
            prop_assert_eq!(g, sigma_nu(nu, level, &pp).unwrap());
        }
    }

    #[test]
    fn phi_nu_sign_pattern(pp in params(), level in 0u32..14) {
        for nu in nu_values(level) {
            let v = phi_nu(nu, level, &pp).unwrap();
            prop_assert!(!v.is_negative());
            prop_assert_eq!(v.is_zero(), nu <= 1);
        }
    }

    #[test]
    fn structure_function_is_a_fock_representation(pp in params(), level in 0u32..12) {
        let phi = phi_sequence(level, &pp).unwrap();
        prop_assert!(phi[0].is_zero());
        prop_assert!(phi.last().unwrap().is_zero());
        prop_assert!(phi[1..phi.len() - 1].iter().all(|v| v.is_positive()));
        prop_assert!(fock_contract(&phi));
    }

    #[test]
    fn general_and_factorized_agree(pp in params(), xn in -20i64..40, order in 0u32..4, even in any::<bool>()) {
        let parity = if even { Parity::Even } else { Parity::Odd };
        let level = 2 * order + parity.nu_offset();
        let sp = StructureFunctionParams { u: parity.u(&pp.k), energy: energy(level, &pp), order, branch: Branch::Upper };
        let x = rat(xn, 4);
        prop_assert_eq!(phi_general(&x, &sp, &pp), phi_factorized(&x, &sp, &pp).unwrap());
    }

    /// The per-branch form at the solved energy is a fixed positive multiple of the factorized one.
    #[test]
    fn branch_form_is_proportional(pp in params(), order in 0u32..4) {
        let sp = StructureFunctionParams { u: Parity::Even.u(&pp.k), energy: energy(2 * order, &pp), order, branch: Branch::Upper };
        let mut ratio = None;
        for xn in 1..=(order as i64) {
            let x = rat_int(xn);
            let r = phi_branch(&x, order, Parity::Even, Branch::Upper, &pp) / phi_factorized(&x, &sp, &pp).unwrap();
            prop_assert!(r.is_positive());
            if let Some(prev) = &ratio {
                prop_assert_eq!(prev, &r);
            }
            ratio = Some(r);
        }
    }
}
