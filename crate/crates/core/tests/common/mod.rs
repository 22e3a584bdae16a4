#![allow(dead_code)]

use openxxz_core::boundary::BoundaryParams;
use openxxz_core::suite::Draw;
use openxxz_core::{c, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_in(r: &mut ChaCha8Rng, re: f64, im: f64) -> C64 {
    c(r.gen_range(-re..re), r.gen_range(-im..im))
}

/// Generic anisotropy: small real part, imaginary part away from 0 and iπ/2.
pub fn eta_draw(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-0.3..0.3), r.gen_range(0.2..1.2))
}

pub fn params_draw(r: &mut ChaCha8Rng) -> BoundaryParams {
    BoundaryParams {
        alpha_minus: complex_in(r, 0.5, 1.5),
        beta_minus: complex_in(r, 0.5, 1.5),
        theta_minus: complex_in(r, 0.5, 1.5),
        alpha_plus: complex_in(r, 0.5, 1.5),
        beta_plus: complex_in(r, 0.5, 1.5),
        theta_plus: complex_in(r, 0.5, 1.5),
    }
}

pub fn draws(seed: u64, count: usize) -> Vec<Draw> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let eta = eta_draw(&mut r);
            let boundary = params_draw(&mut r);
            Draw {
                eta,
                boundary,
                u: complex_in(&mut r, 0.6, 0.6),
                v: complex_in(&mut r, 0.6, 0.6),
            }
        })
        .collect()
}

/// Parameters of the spin-1 energy tables (the constraint holds at k = 1).
pub fn energy_params() -> BoundaryParams {
    BoundaryParams {
        alpha_minus: c(0.0, 0.7),
        beta_minus: c(0.2, 0.0),
        theta_minus: c(0.0, 0.5),
        alpha_plus: c(0.0, 1.2),
        beta_plus: c(-0.2, 0.0),
        theta_plus: c(0.0, -1.1),
    }
}

pub const ENERGY_ETA: C64 = C64 { re: 0.0, im: 0.3 };

/// (k, count⁻, count⁺).
pub const TABLE_N2_S1: [(i64, usize, usize); 6] = [(5, 9, 0), (3, 8, 1), (1, 6, 3), (-1, 3, 6), (-3, 1, 8), (-5, 0, 9)];
pub const TABLE_N3_S1: [(i64, usize, usize); 8] = [
    (7, 27, 0),
    (5, 26, 1),
    (3, 23, 4),
    (1, 17, 10),
    (-1, 10, 17),
    (-3, 4, 23),
    (-5, 1, 26),
    (-7, 0, 27),
];
pub const TABLE_N2_S32: [(i64, usize, usize); 8] = [
    (7, 16, 0),
    (5, 15, 1),
    (3, 13, 3),
    (1, 10, 6),
    (-1, 6, 10),
    (-3, 3, 13),
    (-5, 1, 15),
    (-7, 0, 16),
];
pub const TABLE_N3_S32: [(i64, usize, usize); 11] = [
    (10, 64, 0),
    (8, 63, 1),
    (6, 60, 4),
    (4, 54, 10),
    (2, 44, 20),
    (0, 32, 32),
    (-2, 20, 44),
    (-4, 10, 54),
    (-6, 4, 60),
    (-8, 1, 63),
    (-10, 0, 64),
];

const PI2: f64 = std::f64::consts::FRAC_PI_2;

fn r(re: f64, im: f64) -> C64 {
    c(re, im)
}

/// Printed energies and roots `ṽ` of the (−) sector. `1.5708` stands for `π/2`.
pub fn printed_minus() -> Vec<(f64, Vec<C64>)> {
    let pm = |re: f64, im: f64| [r(re, im), r(re, -im)];
    let cat = |a: &[C64], b: &[C64]| [a, b].concat();
    vec![
        (-8.78796, cat(&pm(0.0781924, 0.150582), &[r(0.573709, 0.0)])),
        (-7.99601, cat(&[r(0.377364, PI2)], &pm(0.0718753, 0.150316))),
        (-5.5443, cat(&pm(0.191917, 0.145165), &[r(0.529223, 0.0)])),
        (-5.07143, cat(&[r(0.375505, PI2)], &pm(0.164075, 0.148506))),
        (-4.31229, cat(&pm(0.158193, 0.299905), &[r(0.158448, 0.0)])),
        (-3.36195, cat(&[r(0.166008, 0.0)], &pm(0.717455, 0.259354))),
        (-2.87198, vec![r(0.358903, PI2), r(0.156172, 0.0), r(0.784233, 0.0)]),
        (-2.86245, cat(&pm(0.33466, 0.286332), &[r(0.337633, 0.0)])),
        (-2.69332, cat(&[r(0.371101, PI2)], &pm(0.292713, 0.157296))),
        (-2.31742, vec![r(0.290731, PI2), r(0.617492, PI2), r(0.146609, 0.0)]),
        (-1.52379, cat(&[r(0.484424, 0.0)], &pm(0.621449, 0.318594))),
        (-1.18428, vec![r(0.356639, PI2), r(0.464322, 0.0), r(0.659312, 0.0)]),
        (-0.780678, vec![r(0.288176, PI2), r(0.610874, PI2), r(0.368261, 0.0)]),
        (-0.379026, cat(&pm(0.879352, 0.483137), &[r(0.944398, 0.0)])),
        (-0.0249248, cat(&[r(0.337585, PI2)], &pm(0.934391, 0.266345))),
        (0.389221, vec![r(0.277491, PI2), r(0.580415, PI2), r(0.97389, 0.0)]),
        (0.838091, vec![r(0.245314, PI2), r(0.477481, PI2), r(0.814847, PI2)]),
    ]
}

/// Printed energies and roots `ṽ` of the (+) sector.
pub fn printed_plus() -> Vec<(f64, Vec<C64>)> {
    let pm = |re: f64, im: f64| vec![r(re, im), r(re, -im)];
    vec![
        (-9.55066, pm(0.0900396, 0.151265)),
        (-5.71507, pm(0.244797, 0.132886)),
        (-4.09573, vec![r(0.0, 1.50013), r(0.182899, 0.0)]),
        (-3.74447, vec![r(0.0, 0.786256), r(0.174481, 0.0)]),
        (-3.02558, pm(0.514399, 0.220939)),
        (-2.07231, vec![r(0.0, 1.48515), r(0.620007, 0.0)]),
        (-1.79241, vec![r(0.0, 0.80571), r(0.568604, 0.0)]),
        (-1.1462, vec![r(0.350408, PI2), r(0.0, 1.38463)]),
        (-0.791024, vec![r(0.093628, PI2), r(0.0, 0.842728)]),
        (-0.634944, vec![r(0.0, 0.979155), r(0.0, 0.863041)]),
    ]
}

/// Componentwise distance between two `ṽ`, minimized over `ṽ ~ −ṽ ~ ṽ + iπ`.
pub fn root_distance(a: C64, b: C64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut best = f64::INFINITY;
    for s in [1.0, -1.0] {
        for shift in [-pi, 0.0, pi] {
            let d = a - (b * s + c(0.0, shift));
            best = best.min(d.re.abs().max(d.im.abs()));
        }
    }
    best
}

/// Largest componentwise distance under the best greedy matching of two
/// root sets, or infinity when the sizes differ.
pub fn roots_mismatch(computed: &[C64], printed: &[C64]) -> f64 {
    if computed.len() != printed.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; computed.len()];
    let mut worst = 0f64;
    for &p in printed {
        let (idx, d) = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &z)| (i, root_distance(z, p)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}
