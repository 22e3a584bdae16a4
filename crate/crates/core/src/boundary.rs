//! Boundary reflection matrices.

use alloc::vec::Vec;

use crate::fusion::{fundamental_r, fused_r, fused_space, symmetrizer, SpinLabel};
use crate::linalg::tensor::{embed, mul_local_left};
use crate::linalg::{ComplexMatrix, C64};
use crate::{ch, sh, xi, Error, Result};

/// Boundary parameters `(α₋, β₋, θ₋)` and `(α₊, β₊, θ₊)`.
///
/// The plus-side values are stored as-is; the sign flips that turn a K⁻ into
/// a K⁺ are applied inside [`kplus`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryParams {
    pub alpha_minus: C64,
    pub beta_minus: C64,
    pub theta_minus: C64,
    pub alpha_plus: C64,
    pub beta_plus: C64,
    pub theta_plus: C64,
}

/// One `(α, β, θ)` triple as consumed by the K⁻ formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KParams {
    pub alpha: C64,
    pub beta: C64,
    pub theta: C64,
}

impl BoundaryParams {
    pub fn minus_side(&self) -> KParams {
        KParams {
            alpha: self.alpha_minus,
            beta: self.beta_minus,
            theta: self.theta_minus,
        }
    }

    /// `(−α₊, −β₊, θ₊)`.
    pub fn plus_substituted(&self) -> KParams {
        KParams {
            alpha: -self.alpha_plus,
            beta: -self.beta_plus,
            theta: self.theta_plus,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.alpha_minus,
            self.beta_minus,
            self.theta_minus,
            self.alpha_plus,
            self.beta_plus,
            self.theta_plus,
        ]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

pub fn kminus_side(u: C64, p: KParams) -> ComplexMatrix {
    let diag_a = sh(p.alpha) * ch(p.beta) * ch(u);
    let diag_b = ch(p.alpha) * sh(p.beta) * sh(u);
    let off = sh(u * 2.0);
    ComplexMatrix::from_vec(
        2,
        2,
        alloc::vec![
            (diag_a + diag_b) * 2.0,
            p.theta.exp() * off,
            (-p.theta).exp() * off,
            (diag_a - diag_b) * 2.0,
        ],
    )
}

/// Fundamental 2×2 K⁻(u) with the minus-side parameters.
pub fn kminus_fundamental(u: C64, _eta: C64, p: &BoundaryParams) -> ComplexMatrix {
    kminus_side(u, p.minus_side())
}

/// Ordered factors of the fused K⁻ on `2j` qubits: for k = 1..2j, the
/// R-matrices `R_{a_l a_k}(2u + (k+l−2j−1)η)` for l < k, then `K_{a_k}`.
enum KFactor {
    Pair(ComplexMatrix, usize, usize),
    Single(ComplexMatrix, usize),
}

fn fused_k_factors(j: SpinLabel, u: C64, eta: C64, p: KParams) -> Vec<KFactor> {
    let n = j.qubits();
    let jj = j.value();
    let mut out = Vec::new();
    for k in 1..=n {
        for l in 1..k {
            let shift = (k + l) as f64 - 2.0 * jj - 1.0;
            out.push(KFactor::Pair(fundamental_r(u * 2.0 + eta * shift, eta), l - 1, k - 1));
        }
        let shift = k as f64 - jj - 0.5;
        out.push(KFactor::Single(kminus_side(u + eta * shift, p), k - 1));
    }
    out
}

fn apply_k_factors(factors: &[KFactor], n: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let dims: Vec<usize> = alloc::vec![2; n];
    let mut out = x.clone();
    for f in factors.iter().rev() {
        out = match f {
            KFactor::Pair(op, a, b) => mul_local_left(op, &out, &dims, &[*a, *b]),
            KFactor::Single(op, a) => mul_local_left(op, &out, &dims, &[*a]),
        };
    }
    out
}

/// Fused K⁻ on the qubit space `(ℂ²)^{⊗2j}`, sandwiched by symmetrizers.
pub fn fused_kminus_big_side(j: SpinLabel, u: C64, eta: C64, p: KParams) -> ComplexMatrix {
    let proj = symmetrizer(j.qubits());
    let inner = apply_k_factors(&fused_k_factors(j, u, eta, p), j.qubits(), &proj);
    proj.matmul(&inner)
}

pub fn fused_kminus_side(j: SpinLabel, u: C64, eta: C64, p: KParams) -> ComplexMatrix {
    let w = fused_space(j).isometry;
    let inner = apply_k_factors(&fused_k_factors(j, u, eta, p), j.qubits(), &w);
    w.adjoint().matmul(&inner)
}

/// Fused K⁻ compressed to the spin-j space.
pub fn fused_kminus(j: SpinLabel, u: C64, eta: C64, p: &BoundaryParams) -> ComplexMatrix {
    fused_kminus_side(j, u, eta, p.minus_side())
}

/// Smallest modulus a normalization factor may have before it is reported
/// as a pole.
pub const POLE_GUARD: f64 = 1e-12;

/// `f^{(j)}(u) = Π_{l=1}^{2j−1} Π_{k=1}^{l} [−ξ(2u + (l+k+1−2j)η)]`.
pub fn kplus_normalization(j: SpinLabel, u: C64, eta: C64) -> Result<C64> {
    let n = j.qubits() as i64;
    let mut f = C64::new(1.0, 0.0);
    for l in 1..n {
        for k in 1..=l {
            let arg = u * 2.0 + eta * (l + k + 1 - n) as f64;
            let factor = -xi(arg, eta);
            if factor.norm() < POLE_GUARD {
                return Err(Error::Pole {
                    what: "K+ normalization factor",
                    at: u,
                });
            }
            f *= factor;
        }
    }
    Ok(f)
}

/// Normalized fused K⁺(u) on the spin-j space.
pub fn kplus(j: SpinLabel, u: C64, eta: C64, p: &BoundaryParams) -> Result<ComplexMatrix> {
    let f = kplus_normalization(j, u, eta)?;
    Ok(fused_kminus_side(j, -u - eta, eta, p.plus_substituted()).scale(C64::new(1.0, 0.0) / f))
}

/// Same as [`kplus`] on the qubit space.
pub fn kplus_big(j: SpinLabel, u: C64, eta: C64, p: &BoundaryParams) -> Result<ComplexMatrix> {
    let f = kplus_normalization(j, u, eta)?;
    Ok(fused_kminus_big_side(j, -u - eta, eta, p.plus_substituted()).scale(C64::new(1.0, 0.0) / f))
}

/// Relative residual of the reflection equation
/// `R(u−v) K_a(u) R(u+v) K_b(v) = K_b(v) R(u+v) K_a(u) R(u−v)` with
/// `R = R^{(j,s)}_{ab}`, `K_a = K⁻^{(j)}`, `K_b = K⁻^{(s)}`.
pub fn check_bybe(j: SpinLabel, s: SpinLabel, u: C64, v: C64, eta: C64, p: &BoundaryParams) -> f64 {
    let dims = [j.dim(), s.dim()];
    let r_minus = fused_r(j, s, u - v, eta);
    let r_plus = fused_r(j, s, u + v, eta);
    let ka = embed(&fused_kminus(j, u, eta, p), &dims, &[0]);
    let kb = embed(&fused_kminus(s, v, eta, p), &dims, &[1]);
    let lhs = r_minus.matmul(&ka).matmul(&r_plus).matmul(&kb);
    let rhs = kb.matmul(&r_plus).matmul(&ka).matmul(&r_minus);
    lhs.rel_diff(&rhs)
}

/// Closed form of `det K⁻(u)`:
/// `4(sh α ch β ch u)² − 4(ch α sh β sh u)² − sh²(2u)`.
pub fn kminus_det_closed_form(u: C64, p: &BoundaryParams) -> C64 {
    let a = sh(p.alpha_minus) * ch(p.beta_minus) * ch(u);
    let b = ch(p.alpha_minus) * sh(p.beta_minus) * sh(u);
    let s2 = sh(u * 2.0);
    a * a * 4.0 - b * b * 4.0 - s2 * s2
}
