mod common;

use common::*;
use openxxz_core::bethe::{
    allowed_k, bae_residual, canonical_vtilde, check_constraint, classify, h1, h1_tilde, h2_tilde, lambda_from_roots,
    m_count, newton_refine, q_from_roots, reconstruction_error, solve_theta_plus, with_solved_theta_plus, Branch,
    FitConfig, SectorConfig, Sign,
};
use openxxz_core::boundary::BoundaryParams;
use openxxz_core::fusion::SpinLabel;
use openxxz_core::suite::{held_out_points, table_row};
use openxxz_core::transfer::{delta_fn, g_factor, lambda_of, spectrum, ChainSpec, SpectrumConfig};
use openxxz_core::{c, Error, C64};

const SIGN_CHOICES: [[Sign; 4]; 4] = [
    [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus],
    [Sign::Minus, Sign::Plus, Sign::Minus, Sign::Minus],
    [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus],
    [Sign::Minus, Sign::Minus, Sign::Minus, Sign::Plus],
];

fn energy_spec(n: usize) -> ChainSpec {
    ChainSpec::new(n, SpinLabel::ONE, ENERGY_ETA, energy_params()).unwrap()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

#[test]
fn h2_is_the_crossing_image_of_h1() {
    let mut r = rng(101);
    for spin in [SpinLabel::HALF, SpinLabel::ONE, SpinLabel::THREE_HALVES] {
        let spec = ChainSpec::new(2, spin, eta_draw(&mut r), params_draw(&mut r)).unwrap();
        for eps in SIGN_CHOICES {
            for branch in [Branch::Minus, Branch::Plus] {
                let sector = SectorConfig::with_signs(branch, eps, 1).unwrap();
                let u = complex_in(&mut r, 0.7, 0.7);
                let a = h2_tilde(&sector, &spec, u).unwrap();
                let b = h1_tilde(&sector, &spec, -u - spec.eta).unwrap();
                assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            }
        }
    }
}

#[test]
fn h1_factorizes_the_quantum_determinant() {
    let mut r = rng(102);
    for spin in [SpinLabel::HALF, SpinLabel::ONE, SpinLabel::THREE_HALVES] {
        let spec = ChainSpec::new(2, spin, eta_draw(&mut r), params_draw(&mut r)).unwrap();
        for eps in SIGN_CHOICES {
            for branch in [Branch::Minus, Branch::Plus] {
                let sector = SectorConfig::with_signs(branch, eps, 1).unwrap();
                let u = complex_in(&mut r, 0.7, 0.7);
                let prod = h1(&sector, &spec, u - spec.eta).unwrap() * h1(&sector, &spec, -u - spec.eta).unwrap();
                let d = delta_fn(&spec, u).unwrap();
                assert!((prod - d).norm() <= 1e-10 * d.norm(), "s={} {eps:?} {branch:?}", spin.value());
            }
        }
    }
}

#[test]
fn h1_tilde_is_h1_over_g() {
    let mut r = rng(103);
    let spec = ChainSpec::new(2, SpinLabel::THREE_HALVES, eta_draw(&mut r), params_draw(&mut r)).unwrap();
    let sector = SectorConfig::new(Branch::Minus, 2);
    let u = c(0.37, 0.11);
    let g = g_factor(&spec, u);
    let expected = h1(&sector, &spec, u).unwrap() / g.powi(4);
    assert!((h1_tilde(&sector, &spec, u).unwrap() - expected).norm() <= 1e-12 * expected.norm());
}

#[test]
fn h1_tilde_vanishes_at_zero_and_has_a_pole() {
    let spec = energy_spec(2);
    let sector = SectorConfig::new(Branch::Plus, 1);
    assert!(h1_tilde(&sector, &spec, zero()).unwrap().norm() < 1e-15);
    assert!(matches!(h1_tilde(&sector, &spec, -spec.eta / 2.0), Err(Error::Pole { .. })));
}

#[test]
fn constraint_examples() {
    let sector = SectorConfig::new(Branch::Plus, 1);
    assert!(check_constraint(&energy_params(), &sector, ENERGY_ETA).norm() < 1e-15);

    let zero_params = BoundaryParams {
        alpha_minus: zero(),
        beta_minus: zero(),
        theta_minus: zero(),
        alpha_plus: zero(),
        beta_plus: zero(),
        theta_plus: zero(),
    };
    assert_eq!(check_constraint(&zero_params, &SectorConfig::new(Branch::Plus, 0), ENERGY_ETA), zero());

    let flipped = SectorConfig::with_signs(Branch::Plus, [Sign::Plus, Sign::Minus, Sign::Minus, Sign::Plus], 1).unwrap();
    assert!(check_constraint(&energy_params(), &flipped, ENERGY_ETA).norm() > 0.1);

    let mut r = rng(104);
    let p = params_draw(&mut r);
    for eps in SIGN_CHOICES {
        let s = SectorConfig::with_signs(Branch::Minus, eps, -3).unwrap();
        let solved = BoundaryParams {
            theta_plus: solve_theta_plus(&p, &s, ENERGY_ETA),
            ..p
        };
        assert!(check_constraint(&solved, &s, ENERGY_ETA).norm() < 1e-13);
    }
}

#[test]
fn invalid_sign_product_is_rejected() {
    assert!(SectorConfig::with_signs(Branch::Plus, [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus], 1).is_err());
}

#[test]
fn m_count_examples_and_parity() {
    let s1n3 = energy_spec(3);
    assert_eq!(m_count(&s1n3, &SectorConfig::new(Branch::Minus, 1)).unwrap(), 3);
    assert_eq!(m_count(&s1n3, &SectorConfig::new(Branch::Plus, 1)).unwrap(), 2);
    let s1n2 = energy_spec(2);
    assert_eq!(m_count(&s1n2, &SectorConfig::new(Branch::Plus, 3)).unwrap(), 0);
    assert_eq!(m_count(&s1n2, &SectorConfig::new(Branch::Plus, 5)).unwrap(), -1);

    for k in -6i64..=6 {
        let sector = SectorConfig::new(Branch::Plus, k);
        assert_eq!(m_count(&s1n2, &sector).is_ok(), k % 2 != 0, "s=1 k={k}");
        for n in [2usize, 3] {
            let spec = ChainSpec::new(n, SpinLabel::THREE_HALVES, ENERGY_ETA, energy_params()).unwrap();
            let ok = m_count(&spec, &sector).is_ok();
            assert_eq!(ok, (k % 2 != 0) == (n % 2 == 0), "s=3/2 N={n} k={k}");
        }
    }
    assert!(matches!(m_count(&s1n2, &SectorConfig::new(Branch::Plus, 2)), Err(Error::Parity { .. })));
    assert_eq!(allowed_k(&s1n2), vec![5, 3, 1, -1, -3, -5]);
}

#[test]
fn q_has_crossing_symmetry() {
    let mut r = rng(105);
    let eta = eta_draw(&mut r);
    let roots: Vec<C64> = (0..4).map(|_| complex_in(&mut r, 1.0, 1.0)).collect();
    for _ in 0..5 {
        let u = complex_in(&mut r, 1.0, 1.0);
        let a = q_from_roots(&roots, eta, u);
        assert!((q_from_roots(&roots, eta, -u - eta) - a).norm() <= 1e-12 * a.norm());
    }
}

#[test]
fn canonical_vtilde_domain() {
    let pi = std::f64::consts::PI;
    let mut r = rng(106);
    for _ in 0..50 {
        let z = complex_in(&mut r, 2.0, 6.0);
        let w = canonical_vtilde(z);
        assert!(w.re >= -1e-9 && w.im > -pi / 2.0 && w.im <= pi / 2.0 + 1e-12);
        for image in [-z, z + c(0.0, pi), -z - c(0.0, 3.0 * pi)] {
            assert!((canonical_vtilde(image) - w).norm() < 1e-12);
        }
    }
}

#[test]
fn printed_roots_are_rounded_bethe_solutions() {
    let spec = energy_spec(3);
    for (branch, printed) in [(Branch::Minus, printed_minus()), (Branch::Plus, printed_plus())] {
        let sector = SectorConfig::new(branch, 1);
        let (_, roots_vt) = &printed[0];
        let roots_v: Vec<C64> = roots_vt.iter().map(|&w| w - spec.eta / 2.0).collect();
        let before = bae_residual(&spec, &sector, &roots_v);
        let refined = newton_refine(&spec, &sector, &roots_v, &FitConfig::default()).unwrap();
        assert!(refined.converged && refined.iterations <= 6, "{} iterations", refined.iterations);
        assert!(refined.residual <= 1e-10);
        let exact: Vec<C64> = refined.roots_v.iter().map(|&v| canonical_vtilde(v + spec.eta / 2.0)).collect();
        assert!(roots_mismatch(&exact, roots_vt) <= 1e-6);

        // the residual of the printed roots is first order in their rounding
        let shrunk: Vec<C64> = refined
            .roots_v
            .iter()
            .zip(&roots_v)
            .map(|(&x, &p)| x + (p - x) / 10.0)
            .collect();
        let ratio = bae_residual(&spec, &sector, &shrunk) / before;
        assert!(ratio > 0.05 && ratio < 0.2, "{branch:?}: ratio {ratio}");

        let again = newton_refine(&spec, &sector, &refined.roots_v, &FitConfig::default()).unwrap();
        assert_eq!(again.iterations, 0);
    }
}

#[test]
fn refined_printed_roots_reproduce_the_eigenvalue() {
    let spec = energy_spec(3);
    let sector = SectorConfig::new(Branch::Plus, 1);
    let roots_v: Vec<C64> = printed_plus()[0].1.iter().map(|&w| w - spec.eta / 2.0).collect();
    let refined = newton_refine(&spec, &sector, &roots_v, &FitConfig::default()).unwrap();
    let levels = spectrum(&spec, &SpectrumConfig::default()).unwrap();
    let points = held_out_points();
    let best = levels
        .iter()
        .map(|l| {
            points
                .iter()
                .map(|&u| {
                    let exact = lambda_of(&spec, l, u).unwrap();
                    let rec = lambda_from_roots(&spec, &sector, &refined.roots_v, u).unwrap();
                    (rec - exact).norm() / exact.norm()
                })
                .fold(0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(best <= 1e-9, "{best:e}");
}

#[test]
fn bae_negative_control_and_empty_set() {
    let spec = energy_spec(3);
    let sector = SectorConfig::new(Branch::Minus, 1);
    let mut r = rng(107);
    let roots: Vec<C64> = (0..3).map(|_| complex_in(&mut r, 1.0, 1.0)).collect();
    assert!(bae_residual(&spec, &sector, &roots) > 1e-2);
    assert_eq!(bae_residual(&spec, &sector, &[]), 0.0);
}

#[test]
fn empty_q_sector_has_exactly_one_level() {
    let mut r = rng(108);
    let (eta, p) = (eta_draw(&mut r), params_draw(&mut r));
    let base = SectorConfig::new(Branch::Plus, 3);
    let out = table_row(2, SpinLabel::ONE, eta, &p, &base, &FitConfig::default()).unwrap();
    let row = out.row();
    assert_eq!((row.count_minus, row.count_plus, row.dual, row.unclassified), (8, 1, 0, 0));
    let sol = out.classification.levels.iter().find_map(|l| l.plus.as_ref()).unwrap();
    assert_eq!(sol.m, 0);
    assert!(sol.roots_v.is_empty());
}

#[test]
fn classification_is_complete_and_saturates() {
    let mut r = rng(109);
    let (eta, p) = (eta_draw(&mut r), params_draw(&mut r));
    for &(k, minus, plus) in &TABLE_N2_S1 {
        let base = SectorConfig::new(Branch::Plus, k);
        let spec = ChainSpec::new(2, SpinLabel::ONE, eta, with_solved_theta_plus(&p, &base, eta)).unwrap();
        let levels = spectrum(&spec, &SpectrumConfig::default()).unwrap();
        let cl = classify(&spec, &levels, &base, &FitConfig::default()).unwrap();
        assert_eq!((cl.row.count_minus, cl.row.count_plus), (minus, plus), "k={k}");
        assert_eq!(cl.row.count_minus + cl.row.count_plus, 9);
        if k.abs() >= 5 {
            assert!(cl.row.count_minus == 9 || cl.row.count_plus == 9);
        }
        for fits in &cl.levels {
            let level = &levels[fits.level_index];
            for sol in [fits.minus.as_ref(), fits.plus.as_ref()].into_iter().flatten() {
                assert_eq!(sol.roots_v.len(), sol.m);
                assert_eq!(sol.q_coeffs.degree(), sol.m);
                assert!(sol.bae_residual <= 1e-10);
                let rec = reconstruction_error(&spec, sol, &held_out_points(), |u| lambda_of(&spec, level, u)).unwrap();
                assert!(rec <= 1e-8);
            }
        }
    }
}

#[test]
fn classification_spot_checks() {
    let mut r = rng(110);
    let (eta, p) = (eta_draw(&mut r), params_draw(&mut r));
    let out = table_row(3, SpinLabel::ONE, eta, &p, &SectorConfig::new(Branch::Plus, -3), &FitConfig::default()).unwrap();
    assert_eq!((out.row().count_minus, out.row().count_plus), (4, 23));
}
