use num_rational::BigRational;
use proptest::prelude::*;

use semilayer::algebra_verify::{
    casimir_check_with, casimir_commutes, compute_c, fit_ac_coefficients, fit_casimir, quadratic_algebra_check,
    AlgebraCoefficients, CasimirPolynomial,
};
use semilayer::model::{ModelParams, Mutation};
use semilayer::poly::{rat, rat_int};
use semilayer::symkernel::{op_equals, NumericOracle};
use semilayer::Error;

fn p(qn: i64, qd: i64, kn: i64, kd: i64) -> ModelParams {
    ModelParams::from_ratios(qn, qd, kn, kd).unwrap()
}

fn points() -> [ModelParams; 3] {
    [p(1, 1, 1, 1), p(2, 1, 3, 2), p(1, 1, 3, 1)]
}

/// `[A, C]` fitted by linear solve against the closed-form coefficients.
#[test]
fn fitted_commutator_coefficients_match_closed_form() {
    for pp in points() {
        let fit = fit_ac_coefficients(&pp, Mutation::None).unwrap().expect("[A, C] lies in the span");
        let (q, k) = (&pp.q, &pp.k);
        let q2 = q * q;
        let q4 = &q2 * &q2;
        let want = vec![
            rat_int(8) * &q2,
            rat_int(8) * &q2,
            rat_int(8) * &q2 * &q2 * (rat_int(2) * k - rat_int(1)),
            rat_int(-8) * &q2,
            rat_int(16) * &q4 * (k * k - rat_int(1)),
            rat_int(0),
            rat_int(16) * &q4 * &q2 * (k - rat_int(1)) * k,
            rat_int(-8) * &q4 * (k - rat_int(1)),
            rat_int(0),
        ];
        assert_eq!(fit, want, "{pp}");
    }
}

#[test]
fn coefficient_set_at_unit_parameters() {
    let co = quadratic_algebra_check(&p(1, 1, 1, 1)).unwrap();
    assert_eq!(co, AlgebraCoefficients::at(&p(1, 1, 1, 1)));
    let (q, k) = (rat_int(1), rat_int(1));
    let e = rat_int(6);
    let vals = co.eval_all(&q, &k, &e);
    // alpha, gamma, a, delta, epsilon, zeta, d, z at E = 6
    assert_eq!(vals.to_vec(), [8, 8, 0, -40, 0, 0, 16, -32].map(rat_int).to_vec());
}

#[test]
fn c_is_anti_self_adjoint() {
    for pp in points() {
        let c = compute_c(&pp).unwrap();
        let sum = &c.adjoint().unwrap() + &c;
        assert!(op_equals(&sum, &semilayer::symkernel::DiffOperator::zero(), &NumericOracle::default()).unwrap().equal);
    }
}

#[test]
fn casimir_is_central_and_fits_the_product_form() {
    for pp in points() {
        assert!(casimir_commutes(&pp).unwrap());
        let fit = fit_casimir(&pp, Mutation::None).unwrap().unwrap();
        assert_eq!(fit, CasimirPolynomial::expected().eval(&pp.q, &pp.k).to_vec(), "{pp}");
    }
}

#[test]
fn casimir_mutation_is_caught_by_the_check() {
    let pp = p(1, 1, 1, 1);
    // The mutation alters the claimed polynomial, not the operator, so the fit is unchanged.
    assert_eq!(fit_casimir(&pp, Mutation::CasimirConstant).unwrap(), fit_casimir(&pp, Mutation::None).unwrap());
    assert!(matches!(casimir_check_with(&pp, Mutation::CasimirConstant), Err(Error::ResidualNonzero { .. })));
    assert!(casimir_check_with(&pp, Mutation::None).is_ok());
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..9).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    /// Expansion coefficients checked against the factored product by hand.
    #[test]
    fn casimir_expansion(q in rational(), k in rational(), e in rational()) {
        let q2 = &q * &q;
        let q4 = &q2 * &q2;
        let product = rat_int(-4) * &q4 * (rat_int(2) * &q2 * (rat_int(7) * &k - rat_int(6)) - rat_int(3) * &e)
            * (rat_int(2) * &q2 * &k - &e);
        let cp = CasimirPolynomial::expected();
        prop_assert_eq!(cp.value_at(&q, &k, &e), product);
        let [k0, k1, k2, k3] = cp.eval(&q, &k);
        prop_assert_eq!(k0, rat_int(-16) * &q4 * &q4 * &k * (rat_int(7) * &k - rat_int(6)));
        prop_assert_eq!(k1, rat_int(8) * &q4 * &q2 * (rat_int(10) * &k - rat_int(6)));
        prop_assert_eq!(k2, rat_int(-12) * &q4);
        prop_assert_eq!(k3, rat_int(0));
    }
}
