//! The spin-1 chain: reduced and gauge-transformed R/K matrices, the
//! transfer matrix `t^{(1,1)}`, the explicit Hamiltonian and the energies
//! in terms of Bethe roots.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::{One, Zero};

use crate::bethe::BetheSolution;
use crate::boundary::{fused_kminus_big_side, kplus_big, BoundaryParams};
use crate::fusion::{fused_r_big, SpinLabel};
use crate::linalg::tensor::embed;
use crate::linalg::{c, kron, vdot, ComplexMatrix, C64};
use crate::transfer::{transfer_from_parts, ChainSpec, SpectrumLevel};
use crate::{ch, sh, Error, Result};

const KEEP: [usize; 3] = [0, 1, 3];

/// The 4×4 row-reduction matrix acting on a pair of spin-1/2 spaces.
pub fn a_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.5, 0.5, 0.0],
        &[0.0, 0.5, -0.5, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn a_inverse() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 1.0, 0.0],
        &[0.0, 1.0, -1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// `B = diag(1, −√(2 ch η), 1)`.
pub fn b_gauge(eta: C64) -> Result<ComplexMatrix> {
    let chn = ch(eta);
    if chn.norm() < 1e-14 {
        return Err(Error::InvalidArgument("ch(eta) = 0 leaves the gauge undefined"));
    }
    Ok(ComplexMatrix::diag(&[C64::one(), -(chn * 2.0).sqrt(), C64::one()]))
}

/// Per-site map from the orthonormal symmetric basis to the gauge basis,
/// `G = diag(1, −√(ch η), 1)`.
pub fn gauge_map(eta: C64) -> ComplexMatrix {
    ComplexMatrix::diag(&[C64::one(), -ch(eta).sqrt(), C64::one()])
}

// A^{⊗p} X (A^{-1})^{⊗p} restricted to rows/cols {0,1,3} of every pair.
fn reduce_pairs(x: &ComplexMatrix, pairs: usize) -> ComplexMatrix {
    let (mut a, mut ai) = (ComplexMatrix::identity(1), ComplexMatrix::identity(1));
    for _ in 0..pairs {
        a = kron(&a, &a_matrix());
        ai = kron(&ai, &a_inverse());
    }
    let full = a.matmul(x).matmul(&ai);
    let idx: Vec<usize> = (0..3usize.pow(pairs as u32))
        .map(|mut r| {
            let mut out = 0;
            let mut place = 1;
            for _ in 0..pairs {
                out += KEEP[r % 3] * place;
                r /= 3;
                place *= 4;
            }
            out
        })
        .collect();
    ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| full[(idx[i], idx[j])])
}

fn gauge(x: &ComplexMatrix, b: &ComplexMatrix, sites: usize) -> ComplexMatrix {
    let binv = ComplexMatrix::diag(&[C64::one(), C64::one() / b[(1, 1)], C64::one()]);
    let (mut l, mut r) = (ComplexMatrix::identity(1), ComplexMatrix::identity(1));
    for _ in 0..sites {
        l = kron(&l, b);
        r = kron(&r, &binv);
    }
    l.matmul(x).matmul(&r)
}

/// Reduced, gauge-transformed `R^{(1,1)}`, `K⁻^{(1)}` and `K⁺^{(1)}`.
#[derive(Clone, Debug)]
pub struct ReducedRK {
    pub r: ComplexMatrix,
    pub kminus: ComplexMatrix,
    pub kplus: ComplexMatrix,
}

pub fn reduced_gauge_rk(u: C64, eta: C64, p: &BoundaryParams) -> Result<ReducedRK> {
    let b = b_gauge(eta)?;
    let one = SpinLabel::ONE;
    let r = reduce_pairs(&fused_r_big(one, one, u, eta), 2);
    let km = reduce_pairs(&fused_kminus_big_side(one, u, eta, p.minus_side()), 1);
    let kp = reduce_pairs(&kplus_big(one, u, eta, p)?, 1);
    Ok(ReducedRK {
        r: gauge(&r, &b, 2),
        kminus: gauge(&km, &b, 1),
        kplus: gauge(&kp, &b, 1),
    })
}

fn require_spin1(spec: &ChainSpec) -> Result<()> {
    if spec.spin != SpinLabel::ONE {
        return Err(Error::InvalidArgument("this operation needs s = 1"));
    }
    Ok(())
}

/// `t^{(1,1) gt}(u)` built from [`reduced_gauge_rk`].
pub fn transfer_gt(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    require_spin1(spec)?;
    let rk = reduced_gauge_rk(u, spec.eta, &spec.boundary)?;
    Ok(transfer_from_parts(spec, 3, &rk.r, &rk.kminus, &rk.kplus))
}

/// `sh(2u) sh(2u+2η) / [sh u sh(u+η)]^{2N}`.
pub fn t11_prefactor(spec: &ChainSpec, u: C64) -> C64 {
    let eta = spec.eta;
    sh(u * 2.0) * sh(u * 2.0 + eta * 2.0) / (sh(u) * sh(u + eta)).powi(2 * spec.n_sites as i32)
}

const CIRCLE_RADIUS: f64 = 0.05;
const CIRCLE_NODES: usize = 32;
const NEAR_ZERO: f64 = 1e-3;

fn t11_direct(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    Ok(transfer_gt(spec, u)?.scale(t11_prefactor(spec, u)))
}

fn circle_nodes(center: C64) -> impl Iterator<Item = (C64, C64)> {
    (0..CIRCLE_NODES).map(move |k| {
        let phase = C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / CIRCLE_NODES as f64);
        (center + phase * CIRCLE_RADIUS, phase)
    })
}

fn near_removable(spec: &ChainSpec, u: C64) -> bool {
    sh(u).norm() < NEAR_ZERO || sh(u + spec.eta).norm() < NEAR_ZERO
}

/// `t̃^{(1,1) gt}(u)`; at `u = 0` and `u = −η` the finite limit is taken as a
/// circle mean.
pub fn rescaled_t11(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    require_spin1(spec)?;
    if !near_removable(spec, u) {
        return t11_direct(spec, u);
    }
    let dim = spec.quantum_dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (z, _) in circle_nodes(u) {
        acc = &acc + &t11_direct(spec, z)?;
    }
    Ok(acc.scale_real(1.0 / CIRCLE_NODES as f64))
}

/// `d/du t̃^{(1,1) gt}(u)` at `u = 0` by the Cauchy integral on a circle.
///
/// The trapezoid rule on `CIRCLE_NODES` points is exact up to terms of order
/// `(radius / distance to the nearest singularity)^CIRCLE_NODES`.
pub fn t11_derivative_at_zero(spec: &ChainSpec) -> Result<ComplexMatrix> {
    require_spin1(spec)?;
    let dim = spec.quantum_dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (z, phase) in circle_nodes(C64::zero()) {
        acc = &acc + &t11_direct(spec, z)?.scale(phase.conj());
    }
    Ok(acc.scale_real(1.0 / (CIRCLE_NODES as f64 * CIRCLE_RADIUS)))
}

/// Spin-1 operators `(S^z, S^+, S^-)`.
pub fn spin1_ops() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let r2 = 2f64.sqrt();
    let sz = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let sp = ComplexMatrix::from_real_rows(&[&[0.0, r2, 0.0], &[0.0, 0.0, r2], &[0.0, 0.0, 0.0]]);
    let sm = sp.transpose();
    (sz, sp, sm)
}

/// `[a0, a1, …, a8]` for one boundary.
pub fn boundary_coeffs(alpha: C64, beta: C64, theta: C64, eta: C64) -> Result<[C64; 9]> {
    let h = eta / 2.0;
    let den = sh(alpha - h) * sh(alpha + h) * ch(beta - h) * ch(beta + h);
    if den.norm() < 1e-14 {
        return Err(Error::Pole {
            what: "a0 normalization",
            at: alpha,
        });
    }
    let a0 = C64::one() / den;
    let (s2, s1) = (sh(eta * 2.0), sh(eta));
    let ch32 = ch(eta).powf(1.5);
    let plus = ch(beta) * sh(alpha) * ch(h) + ch(alpha) * sh(beta) * sh(h);
    let minus = ch(beta) * sh(alpha) * ch(h) - ch(alpha) * sh(beta) * sh(h);
    let (e1, e2) = (theta.exp(), (theta * 2.0).exp());
    Ok([
        a0,
        a0 * 0.25 * (ch(alpha * 2.0) - ch(beta * 2.0) + ch(eta)) * s2 * s1,
        a0 * 0.25 * sh(alpha * 2.0) * sh(beta * 2.0) * s2,
        -a0 * 0.125 * e2 * s2 * s1,
        -a0 * 0.125 / e2 * s2 * s1,
        a0 * e1 * plus * s1 * ch32,
        a0 / e1 * plus * s1 * ch32,
        -a0 * e1 * minus * s1 * ch32,
        -a0 / e1 * minus * s1 * ch32,
    ])
}

/// Boundary coefficients of both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianCoeffs {
    /// `[a0, a1, …, a8]` at site 1.
    pub a: [C64; 9],
    /// `[b0, b1, …, b8]` at site N.
    pub b: [C64; 9],
}

pub fn hamiltonian_coeffs(spec: &ChainSpec) -> Result<HamiltonianCoeffs> {
    let p = &spec.boundary;
    Ok(HamiltonianCoeffs {
        a: boundary_coeffs(p.alpha_minus, p.beta_minus, p.theta_minus, spec.eta)?,
        b: boundary_coeffs(p.alpha_plus, -p.beta_plus, p.theta_plus, spec.eta)?,
    })
}

fn boundary_term(a: &[C64; 9]) -> ComplexMatrix {
    let (sz, sp, sm) = spin1_ops();
    let terms = [
        sz.matmul(&sz),
        sz.clone(),
        sp.matmul(&sp),
        sm.matmul(&sm),
        sp.matmul(&sz),
        sz.matmul(&sm),
        sz.matmul(&sp),
        sm.matmul(&sz),
    ];
    terms
        .iter()
        .zip(&a[1..])
        .fold(ComplexMatrix::zeros(3, 3), |acc, (t, &k)| &acc + &t.scale(k))
}

/// Two-site bulk term on `C³ ⊗ C³`.
pub fn bulk_term(eta: C64) -> ComplexMatrix {
    let (sz, sp, sm) = spin1_ops();
    let sigma_perp = (&kron(&sp, &sm) + &kron(&sm, &sp)).scale_real(0.5);
    let sigma_z = kron(&sz, &sz);
    let sigma = &sigma_perp + &sigma_z;
    let id = ComplexMatrix::identity(3);
    let sz2 = sz.matmul(&sz);
    let sq = &kron(&sz2, &id) + &kron(&id, &sz2);
    let sh_e = sh(eta);
    let sh_h = sh(eta / 2.0);
    let bracket = &(&sigma_z + &sq) - &sigma_z.matmul(&sigma_z);
    let anti = &sigma_perp.matmul(&sigma_z) + &sigma_z.matmul(&sigma_perp);
    let mut h = &sigma - &sigma.matmul(&sigma);
    h = &h + &bracket.scale(sh_e * sh_e * 2.0);
    &h - &anti.scale(sh_h * sh_h * 4.0)
}

/// The spin-1 Hamiltonian with bulk and boundary terms, on `(C³)^{⊗N}`.
pub fn hamiltonian_explicit(spec: &ChainSpec) -> Result<ComplexMatrix> {
    require_spin1(spec)?;
    let n = spec.n_sites;
    let dims = vec![3usize; n];
    let coeffs = hamiltonian_coeffs(spec)?;
    let bulk = bulk_term(spec.eta);
    let mut h = ComplexMatrix::zeros(spec.quantum_dim(), spec.quantum_dim());
    for site in 0..n.saturating_sub(1) {
        h = &h + &embed(&bulk, &dims, &[site, site + 1]);
    }
    h = &h + &embed(&boundary_term(&coeffs.a), &dims, &[0]);
    h = &h + &embed(&boundary_term(&coeffs.b), &dims, &[n - 1]);
    Ok(h)
}

/// The normalization `c₁` relating `H` to `d t̃^{(1,1) gt}/du` at `u = 0`.
///
/// The sign is the one that holds with `K⁺` normalized by
/// [`crate::boundary::kplus_normalization`]: the closed form with a leading
/// `+ch η`. [`c1_closed_form`] keeps the other sign.
pub fn c1_value(spec: &ChainSpec) -> Result<C64> {
    Ok(-c1_closed_form(spec)?)
}

/// `−ch η {16 [sh 2η sh η]^{2N} sh 3η Π sh(α±η/2) ch(β±η/2)}^{-1}`.
pub fn c1_closed_form(spec: &ChainSpec) -> Result<C64> {
    require_spin1(spec)?;
    let eta = spec.eta;
    let p = &spec.boundary;
    let h = eta / 2.0;
    let bulk = (sh(eta * 2.0) * sh(eta)).powi(2 * spec.n_sites as i32) * 16.0 * sh(eta * 3.0);
    let side = |a: C64, b: C64| sh(a - h) * sh(a + h) * ch(b - h) * ch(b + h);
    let den = bulk * side(p.alpha_minus, p.beta_minus) * side(p.alpha_plus, p.beta_plus);
    if den.norm() < 1e-300 {
        return Err(Error::Pole {
            what: "c1 denominator",
            at: eta,
        });
    }
    Ok(-ch(eta) / den)
}

/// Relative tolerance for `H − c₁ t̃′(0)` to count as a multiple of the identity.
pub const C0_TOL: f64 = 1e-7;

/// `c₀` and the relative residual `‖H − c₁ t̃′(0) − c₀ I‖ / ‖H‖`.
pub fn c0_value(spec: &ChainSpec) -> Result<(C64, f64)> {
    let h = hamiltonian_explicit(spec)?;
    let c1 = c1_value(spec)?;
    let d = &h - &t11_derivative_at_zero(spec)?.scale(c1);
    let c0 = d.trace() / d.rows() as f64;
    let residual = d.add_scalar_identity(-c0).norm_fro() / h.norm_fro();
    if !(residual <= C0_TOL) {
        return Err(Error::Inconsistent {
            residual,
            tolerance: C0_TOL,
        });
    }
    Ok((c0, residual))
}

fn gauge_full(spec: &ChainSpec, inverse: bool) -> Vec<C64> {
    let g = gauge_map(spec.eta);
    let d: Vec<C64> = (0..3)
        .map(|i| if inverse { C64::one() / g[(i, i)] } else { g[(i, i)] })
        .collect();
    let mut out = vec![C64::one()];
    for _ in 0..spec.n_sites {
        out = out.iter().flat_map(|&x| d.iter().map(move |&y| x * y)).collect();
    }
    out
}

/// `⟨level| H |level⟩` with the eigenvector pair carried into the gauge basis.
pub fn level_energy_direct(spec: &ChainSpec, h: &ComplexMatrix, level: &SpectrumLevel) -> C64 {
    let g = gauge_full(spec, false);
    let gi = gauge_full(spec, true);
    let right: Vec<C64> = level.right.iter().zip(&g).map(|(x, y)| x * y).collect();
    let left: Vec<C64> = level.left.iter().zip(&gi).map(|(x, y)| x * y.conj()).collect();
    vdot(&left, &h.mul_vec(&right))
}

/// `sh²(2η) Σ_j 1/(sh(ṽ_j−η) sh(ṽ_j+η)) + N(sh 3η / sh η − 3)`, the energy
/// without the sector constant.
pub fn energy_root_part(spec: &ChainSpec, roots_v: &[C64]) -> Result<C64> {
    let eta = spec.eta;
    let mut sum = C64::zero();
    for &v in roots_v {
        let vt = v + eta / 2.0;
        let den = sh(vt - eta) * sh(vt + eta);
        if den.norm() < 1e-14 {
            return Err(Error::Pole {
                what: "Bethe root at +-eta in the energy",
                at: vt,
            });
        }
        sum += C64::one() / den;
    }
    Ok(sh(eta * 2.0) * sh(eta * 2.0) * sum + (sh(eta * 3.0) / sh(eta) - 3.0) * spec.n_sites as f64)
}

/// Energy of a Bethe state given the sector constant `c^{(±)}`.
pub fn energies_from_roots(spec: &ChainSpec, sol: &BetheSolution, sector_constant: C64) -> Result<C64> {
    require_spin1(spec)?;
    Ok(energy_root_part(spec, &sol.roots_v)? + sector_constant)
}

/// `c^{(±)} = E_direct − energy_root_part` for one level.
pub fn calibrate_sector_constant(spec: &ChainSpec, sol: &BetheSolution, e_direct: C64) -> Result<C64> {
    Ok(e_direct - energy_root_part(spec, &sol.roots_v)?)
}
