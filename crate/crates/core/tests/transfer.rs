mod common;

use common::*;
use openxxz_core::fusion::{fused_r, SpinLabel};
use openxxz_core::linalg::ComplexMatrix;
use openxxz_core::linalg::tensor::embed;
use openxxz_core::transfer::{
    check_asymptotic, check_crossing, check_fusion_hierarchy, check_initial, check_periodicity, check_semiclassical,
    commutator_residual, delta_fn, hat_monodromy, initial_value, lambda_of, lambdas_at, monodromy, near_singular_point,
    rescaled_fundamental, semiclassical_value, spectrum, transfer, ChainSpec, SpectrumConfig,
};
use openxxz_core::{c, sh, Error, C64};
use rand_chacha::ChaCha8Rng;

const I_PI: C64 = C64 {
    re: 0.0,
    im: std::f64::consts::PI,
};

fn random_spec(r: &mut ChaCha8Rng, n: usize, spin: SpinLabel) -> ChainSpec {
    let eta = eta_draw(r);
    ChainSpec::new(n, spin, eta, params_draw(r)).unwrap()
}

// Draws a spectral point away from the singular lines.
fn sample_point(r: &mut ChaCha8Rng, spec: &ChainSpec) -> C64 {
    loop {
        let u = complex_in(r, 0.8, 0.8);
        if !near_singular_point(spec, u) {
            return u;
        }
    }
}

#[test]
fn monodromy_single_site_is_the_r_matrix() {
    let mut r = rng(21);
    let spec = random_spec(&mut r, 1, SpinLabel::ONE);
    let u = c(0.3, 0.2);
    let rm = fused_r(SpinLabel::HALF, SpinLabel::ONE, u, spec.eta);
    assert!(monodromy(SpinLabel::HALF, &spec, u).rel_diff(&rm) < 1e-15);
    assert!(hat_monodromy(SpinLabel::HALF, &spec, u).rel_diff(&rm) < 1e-15);
}

#[test]
fn monodromy_two_sites_matches_explicit_product() {
    let mut r = rng(22);
    let spec = random_spec(&mut r, 2, SpinLabel::ONE);
    let u = c(0.41, -0.17);
    let dims = [2, 3, 3];
    let rm = fused_r(SpinLabel::HALF, SpinLabel::ONE, u, spec.eta);
    let r1 = embed(&rm, &dims, &[0, 1]);
    let r2 = embed(&rm, &dims, &[0, 2]);
    assert!(monodromy(SpinLabel::HALF, &spec, u).rel_diff(&r2.matmul(&r1)) < 1e-14);
    assert!(hat_monodromy(SpinLabel::HALF, &spec, u).rel_diff(&r1.matmul(&r2)) < 1e-14);
}

#[test]
fn isotropic_point_is_scalar() {
    let mut r = rng(23);
    let spec = random_spec(&mut r, 3, SpinLabel::HALF).with_eta(C64::new(0.0, 0.0));
    let u = c(0.35, 0.25);
    let m = monodromy(SpinLabel::HALF, &spec, u);
    let id = ComplexMatrix::identity(m.rows()).scale(sh(u).powi(3));
    assert!(m.rel_diff(&id) < 1e-14);
    let t = transfer(SpinLabel::HALF, &spec, u).unwrap();
    let t00 = t[(0, 0)];
    assert!(t.rel_diff(&ComplexMatrix::identity(t.rows()).scale(t00)) < 1e-13);
}

#[test]
fn commutativity_matrix() {
    let configs = [
        (2, SpinLabel::HALF),
        (2, SpinLabel::ONE),
        (3, SpinLabel::ONE),
        (2, SpinLabel::THREE_HALVES),
    ];
    let js = [SpinLabel::HALF, SpinLabel::ONE];
    for (i, (n, spin)) in configs.into_iter().enumerate() {
        let mut r = rng(30 + i as u64);
        let spec = random_spec(&mut r, n, spin);
        let mut worst = 0f64;
        for d in 0..20 {
            let (j, jp) = (js[d % 2], js[(d / 2) % 2]);
            let (u, up) = (sample_point(&mut r, &spec), sample_point(&mut r, &spec));
            match commutator_residual(&spec, j, u, jp, up) {
                Ok(res) => worst = worst.max(res),
                Err(Error::Pole { .. }) => continue,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(worst <= 1e-11, "N={n} s={}: {worst:e}", spin.value());
    }
}

#[test]
fn fusion_hierarchy_cases() {
    let cases = [
        (SpinLabel::ONE, SpinLabel::HALF, 1e-10),
        (SpinLabel::ONE, SpinLabel::ONE, 1e-10),
        (SpinLabel::THREE_HALVES, SpinLabel::HALF, 1e-9),
    ];
    for (i, (j, s, tol)) in cases.into_iter().enumerate() {
        let mut r = rng(40 + i as u64);
        let spec = random_spec(&mut r, 2, s);
        for _ in 0..3 {
            let u = sample_point(&mut r, &spec);
            let res = check_fusion_hierarchy(&spec, j, u).unwrap();
            assert!(res <= tol, "j={} s={}: {res:e}", j.value(), s.value());
        }
    }
    let spec = random_spec(&mut rng(43), 2, SpinLabel::HALF);
    assert!(check_fusion_hierarchy(&spec, SpinLabel::HALF, c(0.3, 0.1)).is_err());
}

#[test]
fn delta_vanishes_at_boundary_parameters() {
    let mut r = rng(50);
    let spec = random_spec(&mut r, 2, SpinLabel::ONE);
    let generic = delta_fn(&spec, c(0.31, 0.27)).unwrap().norm();
    for u in [spec.boundary.alpha_minus, -spec.boundary.alpha_plus] {
        let d = delta_fn(&spec, u).unwrap();
        assert!(d.norm() <= 1e-12 * generic.max(1.0), "u = {u}: {d}");
    }
    assert!(delta_fn(&spec, spec.eta / 2.0).is_err());
}

#[test]
fn scalar_properties() {
    for (i, (n, spin)) in [(2, SpinLabel::HALF), (2, SpinLabel::ONE), (2, SpinLabel::THREE_HALVES)]
        .into_iter()
        .enumerate()
    {
        let mut r = rng(60 + i as u64);
        let spec = random_spec(&mut r, n, spin);
        let u = sample_point(&mut r, &spec);
        assert!(check_initial(&spec).unwrap() <= 1e-10);
        assert!(check_periodicity(&spec, u).unwrap() <= 1e-10);
        assert!(check_crossing(&spec, u).unwrap() <= 1e-10);
        assert!(check_semiclassical(&spec, u).unwrap() <= 1e-12);
        // at η = 0 both limits give the same (vanishing) scalar at u = 0
        let spec0 = spec.with_eta(C64::new(0.0, 0.0));
        let zero = C64::new(0.0, 0.0);
        assert_eq!(initial_value(&spec0), semiclassical_value(&spec0, zero));
        assert!(rescaled_fundamental(&spec0, zero).unwrap().norm_max() <= 1e-14);
    }
}

#[test]
fn semiclassical_with_equal_thetas() {
    let mut r = rng(64);
    let mut spec = random_spec(&mut r, 2, SpinLabel::ONE);
    spec.boundary.theta_plus = spec.boundary.theta_minus;
    assert!(check_semiclassical(&spec, c(0.44, -0.3)).unwrap() <= 1e-12);
}

#[test]
fn asymptotic_residual_decays() {
    let mut r = rng(65);
    let spec = random_spec(&mut r, 2, SpinLabel::ONE);
    let r12 = check_asymptotic(&spec, 12.0).unwrap();
    let r15 = check_asymptotic(&spec, 15.0).unwrap();
    assert!(r12 <= 1e-8, "{r12:e}");
    // O(e^{−2u}) correction: the ratio should be close to e^{−6}
    let ratio = r15 / r12;
    assert!(ratio > (-6.0f64).exp() / 3.0 && ratio < (-6.0f64).exp() * 3.0, "ratio {ratio:e}");
}

#[test]
fn spectrum_sizes_and_consistency() {
    for (i, (n, spin, count)) in [(2, SpinLabel::ONE, 9), (3, SpinLabel::ONE, 27), (2, SpinLabel::THREE_HALVES, 16)]
        .into_iter()
        .enumerate()
    {
        let mut r = rng(70 + i as u64);
        let spec = random_spec(&mut r, n, spin);
        let cfg = SpectrumConfig::default();
        let levels = spectrum(&spec, &cfg).unwrap();
        assert_eq!(levels.len(), count);
        let t0 = rescaled_fundamental(&spec, cfg.u0).unwrap();
        let scale = t0.norm_fro();
        for l in &levels {
            let tr = t0.mul_vec(&l.right);
            let res: f64 = tr.iter().zip(&l.right).map(|(a, b)| (a - l.lambda0 * b).norm_sqr()).sum::<f64>().sqrt();
            assert!(res <= 1e-9 * scale);
            assert!((lambda_of(&spec, l, cfg.u0).unwrap() - l.lambda0).norm() <= 1e-9 * scale);
            if !l.degenerate_flag {
                let pair: C64 = l.left.iter().zip(&l.right).map(|(a, b)| a.conj() * b).sum();
                assert!((pair - 1.0).norm() < 1e-9);
            }
        }

        for _ in 0..10 {
            let u = sample_point(&mut r, &spec);
            let t = rescaled_fundamental(&spec, u).unwrap();
            let sum: C64 = lambdas_at(&spec, &levels, u).unwrap().into_iter().sum();
            assert!((sum - t.trace()).norm() <= 1e-9 * t.trace().norm().max(t.norm_fro()));
        }
    }
}

#[test]
fn spectrum_of_largest_geometry() {
    let mut r = rng(74);
    let spec = random_spec(&mut r, 3, SpinLabel::THREE_HALVES);
    assert_eq!(spectrum(&spec, &SpectrumConfig::default()).unwrap().len(), 64);
}

#[test]
fn eigenvalue_functions_inherit_the_properties() {
    let mut r = rng(80);
    let spec = random_spec(&mut r, 2, SpinLabel::ONE);
    let levels = spectrum(&spec, &SpectrumConfig::default()).unwrap();
    let t0 = initial_value(&spec);
    let u = sample_point(&mut r, &spec);
    for l in &levels {
        let at0 = lambda_of(&spec, l, C64::new(0.0, 0.0)).unwrap();
        assert!((at0 - t0).norm() <= 1e-9 * t0.norm());
        let base = lambda_of(&spec, l, u).unwrap();
        let scale = base.norm().max(t0.norm());
        assert!((lambda_of(&spec, l, -u - spec.eta).unwrap() - base).norm() <= 1e-9 * scale);
        assert!((lambda_of(&spec, l, u + I_PI).unwrap() - base).norm() <= 1e-9 * scale);
    }
}

#[test]
fn dimension_cap_is_enforced() {
    let p = params_draw(&mut rng(90));
    assert!(matches!(
        ChainSpec::new(5, SpinLabel::THREE_HALVES, c(0.0, 0.5), p),
        Err(Error::DimensionCap { .. })
    ));
}
