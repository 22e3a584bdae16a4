use openxxz_core::appendix::{
    conjecture_least_squares, conjecture_residual, expansion_coeffs, known_x, perm_sum, swap_symmetric_part,
    verify_conjecture, verify_fund_exp, Rational, MAX_FUND_EXP,
};
use openxxz_core::fusion::{symmetrizer, SpinLabel};
use openxxz_core::linalg::ComplexMatrix;
use openxxz_core::{c, C64};
use proptest::prelude::*;

#[test]
fn low_order_coefficients() {
    assert_eq!(expansion_coeffs(1), vec![Rational::from_integer(1)]);
    assert_eq!(expansion_coeffs(2), vec![Rational::new(1, 2), Rational::new(1, 4)]);
    for n in 1..=8 {
        assert_eq!(expansion_coeffs(n).len(), n / 2 + 1);
    }
}

#[test]
fn symmetrizer_expansion() {
    assert_eq!(verify_fund_exp(2).unwrap(), 0.0);
    for n in 1..=MAX_FUND_EXP {
        let r = verify_fund_exp(n).unwrap();
        assert!(r <= 1e-12, "n={n}: {r:e}");
    }
    assert!(verify_fund_exp(MAX_FUND_EXP + 1).is_err());
    assert!(verify_fund_exp(0).is_err());
}

#[test]
fn explicit_projector_relations() {
    for twice in [3, 4, 5] {
        let r = verify_conjecture(SpinLabel::from_twice(twice)).unwrap();
        assert!(r <= 1e-13, "2j={twice}: {r:e}");
    }
}

#[test]
fn three_halves_x_matrices_are_the_displayed_ones() {
    let x = known_x(SpinLabel::THREE_HALVES).unwrap();
    let p = |a: usize, b: usize| perm_sum(3, &[openxxz_core::appendix::PermTerm { coeff: Rational::from_integer(1), swaps: vec![(a, b)] }]);
    let x1 = (&p(2, 3) - &p(1, 3)).scale_real(1.0 / 3.0);
    let x2 = (&p(1, 2) - &p(1, 3)).scale_real(1.0 / 3.0);
    assert!(perm_sum(3, &x[0]).rel_diff(&x1) < 1e-15);
    assert!(perm_sum(3, &x[1]).rel_diff(&x2) < 1e-15);
    assert!(known_x(SpinLabel::from_twice(6)).is_none());
}

#[test]
fn spin_three_relation_exists() {
    let r = verify_conjecture(SpinLabel::from_twice(6)).unwrap();
    assert!(r <= 1e-10, "{r:e}");
}

#[test]
fn least_squares_recovers_known_cases() {
    for twice in [3, 4] {
        assert!(conjecture_least_squares(SpinLabel::from_twice(twice), 2) <= 1e-10);
    }
}

#[test]
fn out_of_range_spins_are_rejected() {
    assert!(verify_conjecture(SpinLabel::ONE).is_err());
    assert!(verify_conjecture(SpinLabel::from_twice(7)).is_err());
}

#[test]
fn a_wrong_x_is_detected() {
    let j = SpinLabel::THREE_HALVES;
    let mut xs: Vec<ComplexMatrix> = known_x(j).unwrap().iter().map(|t| perm_sum(3, t)).collect();
    xs[0] = xs[0].scale_real(2.0);
    assert!(conjecture_residual(j, &xs) > 1e-3);
}

fn entries(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    let dim = 1usize << n;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| ComplexMatrix::from_vec(dim, dim, v.into_iter().map(|(a, b)| c(a, b)).collect::<Vec<C64>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn only_the_antisymmetric_part_of_x_matters(s in entries(4), k in 0usize..3) {
        let j = SpinLabel::from_twice(4);
        let base: Vec<ComplexMatrix> = known_x(j).unwrap().iter().map(|t| perm_sum(4, t)).collect();
        let mut perturbed = base.clone();
        perturbed[k] = &perturbed[k] + &swap_symmetric_part(4, k, &s);
        let (r0, r1) = (conjecture_residual(j, &base), conjecture_residual(j, &perturbed));
        prop_assert!((r1 - r0).abs() <= 1e-12 * (1.0 + s.norm_fro()));
    }

    #[test]
    fn expansion_coefficients_rebuild_the_symmetrizer_trace(n in 1usize..=MAX_FUND_EXP) {
        // tr P⁺ = n + 1 on n qubits; the expansion must reproduce it
        let r = verify_fund_exp(n).unwrap();
        prop_assert!(r <= 1e-12);
        prop_assert!((symmetrizer(n).trace() - c((n + 1) as f64, 0.0)).norm() < 1e-12);
    }
}
