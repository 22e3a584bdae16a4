//! Fundamental and fused R-matrices.
//!
//! A spin-j space is realized as the totally symmetric subspace of 2j
//! qubits. Fused operators are first built on the qubit ("big") space and
//! then compressed with an orthonormal isometry onto that subspace.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::linalg::tensor::{embed, mul_local_left, qubit_permutation, transposition};
use crate::linalg::{c, ComplexMatrix, C64};
use crate::sh;

/// Spin `j`, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel(u32);

impl SpinLabel {
    pub const HALF: SpinLabel = SpinLabel(1);
    pub const ONE: SpinLabel = SpinLabel(2);
    pub const THREE_HALVES: SpinLabel = SpinLabel(3);

    /// Panics on `twice_spin == 0`; spin zero has no auxiliary or quantum space.
    pub fn from_twice(twice_spin: u32) -> Self {
        assert!(twice_spin >= 1, "spin must be at least 1/2");
        SpinLabel(twice_spin)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Number of qubits carrying this spin.
    pub fn qubits(self) -> usize {
        self.0 as usize
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl core::fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Isometry from the `(2j+1)`-dimensional spin-j space into `(ℂ²)^{⊗2j}`.
#[derive(Clone, Debug)]
pub struct FusedSpace {
    pub spin: SpinLabel,
    pub isometry: ComplexMatrix,
}

/// The 4×4 fundamental R-matrix in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
pub fn fundamental_r(u: C64, eta: C64) -> ComplexMatrix {
    let a = sh(u + eta);
    let b = sh(u);
    let cc = sh(eta);
    let z = C64::zero();
    ComplexMatrix::from_vec(
        4,
        4,
        alloc::vec![
            a, z, z, z, //
            z, b, cc, z, //
            z, cc, b, z, //
            z, z, z, a,
        ],
    )
}

/// Symmetric projector on `n` qubits, built as the ordered product
/// `(1/n!) Π_{k=1..n} (Σ_{l=1..k} 𝒫_{l,k})` with `𝒫_{k,k} = 1`.
pub fn symmetrizer(n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    let dim = 1usize << n;
    let mut acc = ComplexMatrix::identity(dim);
    let mut fact = 1.0;
    for k in 0..n {
        let mut factor = ComplexMatrix::zeros(dim, dim);
        for l in 0..=k {
            factor = &factor + &transposition(n, l, k);
        }
        acc = acc.matmul(&factor);
        fact *= (k + 1) as f64;
    }
    acc.scale_real(1.0 / fact)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Orthonormal basis of the symmetric subspace, columns ordered by the number
/// of down spins (all-up first). Qubit value 0 is spin up.
pub fn fused_space(j: SpinLabel) -> FusedSpace {
    let n = j.qubits();
    let dim = 1usize << n;
    let mut iso = ComplexMatrix::zeros(dim, n + 1);
    for m in 0..=n {
        let w = 1.0 / binomial(n, m).sqrt();
        for state in 0..dim {
            if (state as u32).count_ones() as usize == m {
                iso[(state, m)] = c(w, 0.0);
            }
        }
    }
    FusedSpace {
        spin: j,
        isometry: iso,
    }
}

/// `(W_a ⊗ W_b)`: isometry of the pair space.
fn pair_isometry(j: SpinLabel, s: SpinLabel) -> ComplexMatrix {
    crate::linalg::kron(&fused_space(j).isometry, &fused_space(s).isometry)
}

/// Applies the ordered factor list `F_1 F_2 ⋯ F_m` (each a 4×4 operator on a
/// pair of qubits) to the columns of `x`, on `n` qubits.
pub(crate) fn apply_two_qubit_product(
    factors: &[(ComplexMatrix, usize, usize)],
    n: usize,
    x: &ComplexMatrix,
) -> ComplexMatrix {
    let dims: Vec<usize> = alloc::vec![2; n];
    let mut out = x.clone();
    for (op, p, q) in factors.iter().rev() {
        out = mul_local_left(op, &out, &dims, &[*p, *q]);
    }
    out
}

fn fused_r_factors(j: SpinLabel, s: SpinLabel, u: C64, eta: C64) -> Vec<(ComplexMatrix, usize, usize)> {
    let na = j.qubits();
    let nb = s.qubits();
    let mut factors = Vec::with_capacity(na * nb);
    for k in 1..=na {
        for l in 1..=nb {
            let shift = (k + l) as f64 - j.value() - s.value() - 1.0;
            factors.push((fundamental_r(u + eta * shift, eta), k - 1, na + l - 1));
        }
    }
    factors
}

/// Fused R-matrix on the qubit space `(ℂ²)^{⊗2j} ⊗ (ℂ²)^{⊗2s}`, including the
/// symmetric projectors on both sides.
pub fn fused_r_big(j: SpinLabel, s: SpinLabel, u: C64, eta: C64) -> ComplexMatrix {
    let n = j.qubits() + s.qubits();
    let proj = crate::linalg::kron(&symmetrizer(j.qubits()), &symmetrizer(s.qubits()));
    let inner = apply_two_qubit_product(&fused_r_factors(j, s, u, eta), n, &proj);
    proj.matmul(&inner)
}

/// Fused R-matrix compressed onto the spin-j ⊗ spin-s space,
/// `(W_a ⊗ W_b)ᴴ · R_big · (W_a ⊗ W_b)`.
pub fn fused_r(j: SpinLabel, s: SpinLabel, u: C64, eta: C64) -> ComplexMatrix {
    let n = j.qubits() + s.qubits();
    let w = pair_isometry(j, s);
    let inner = apply_two_qubit_product(&fused_r_factors(j, s, u, eta), n, &w);
    w.adjoint().matmul(&inner)
}

/// Relative residual of the Yang–Baxter equation
/// `R_ab(u−v) R_ac(u) R_bc(v) = R_bc(v) R_ac(u) R_ab(u−v)` for spins `(j, k, s)`
/// on spaces `(a, b, c)`.
pub fn check_ybe(j: SpinLabel, k: SpinLabel, s: SpinLabel, u: C64, v: C64, eta: C64) -> f64 {
    let dims = [j.dim(), k.dim(), s.dim()];
    let rab = embed(&fused_r(j, k, u - v, eta), &dims, &[0, 1]);
    let rac = embed(&fused_r(j, s, u, eta), &dims, &[0, 2]);
    let rbc = embed(&fused_r(k, s, v, eta), &dims, &[1, 2]);
    let lhs = rab.matmul(&rac).matmul(&rbc);
    let rhs = rbc.matmul(&rac).matmul(&rab);
    lhs.rel_diff(&rhs)
}

/// `R(u)·R(−u) + ξ(u)·1`, relative to `|ξ(u)|`.
pub fn unitarity_residual(u: C64, eta: C64) -> f64 {
    let prod = fundamental_r(u, eta).matmul(&fundamental_r(-u, eta));
    let xi = crate::xi(u, eta);
    let target = ComplexMatrix::identity(4).scale(-xi);
    (&prod - &target).norm_fro() / (xi.norm() * 2.0).max(f64::MIN_POSITIVE)
}

/// Qubit permutation for `σ` given as the image list of 0-based positions.
pub fn permutation_operator(perm: &[usize]) -> ComplexMatrix {
    qubit_permutation(perm)
}

/// Embeds a projector-like product `P⁺_{sites}` of a contiguous qubit block.
pub fn symmetrizer_on(n: usize, first: usize, len: usize) -> ComplexMatrix {
    if len <= 1 {
        return ComplexMatrix::identity(1usize << n);
    }
    let sites: Vec<usize> = (first..first + len).collect();
    embed(&symmetrizer(len), &alloc::vec![2; n], &sites)
}
