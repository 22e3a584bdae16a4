//! Non-Hermitian eigendecomposition: Householder reduction to Hessenberg
//! form, single-shift complex QR to Schur form, triangular back-substitution
//! for right eigenvectors, and left eigenvectors from the inverse of the
//! right eigenvector matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::matrix::{vdot, vec_norm, ComplexMatrix, C64};
use super::solve::{inverse, pseudo_inverse};
use crate::{Error, Result};

/// Knobs for [`eig`].
#[derive(Clone, Copy, Debug)]
pub struct EigConfig {
    /// Largest accepted dimension.
    pub max_dim: usize,
    /// Iteration budget per eigenvalue.
    pub max_iter_per_value: usize,
    /// Condition number of the right eigenvector matrix above which the
    /// left/right pairing is treated as degenerate.
    pub pairing_cond_limit: f64,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            max_dim: crate::DEFAULT_MAX_DIM,
            max_iter_per_value: 60,
            pairing_cond_limit: 1e10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenTriple {
    pub value: C64,
    /// Unit-norm right eigenvector.
    pub right: Vec<C64>,
    /// Left eigenvector scaled so that `leftᴴ·right = 1`.
    pub left: Vec<C64>,
    /// Set when the pairing fell back to a pseudo-inverse.
    pub degenerate: bool,
}

pub fn eig(a: &ComplexMatrix) -> Result<Vec<EigenTriple>> {
    eig_with(a, &EigConfig::default())
}

pub fn eig_with(a: &ComplexMatrix, cfg: &EigConfig) -> Result<Vec<EigenTriple>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n > cfg.max_dim {
        return Err(Error::DimensionCap {
            dim: n,
            cap: cfg.max_dim,
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (t, z) = schur(a, cfg)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let x = triangular_eigenvectors(&t);
    let mut v = z.matmul(&x);
    for col in 0..n {
        let nv = vec_norm(&v.col_vec(col));
        if nv > 0.0 {
            for r in 0..n {
                v[(r, col)] = v[(r, col)] / nv;
            }
        }
    }

    let (vinv, degenerate) = match inverse(&v) {
        Some(inv) if v.norm_fro() * inv.norm_fro() <= cfg.pairing_cond_limit => (inv, false),
        _ => (pseudo_inverse(&v, 1e-12), true),
    };

    Ok((0..n)
        .map(|i| {
            let right = v.col_vec(i);
            let left: Vec<C64> = vinv.row(i).iter().map(|z| z.conj()).collect();
            let pairing = vdot(&left, &right);
            EigenTriple {
                value: values[i],
                right,
                left,
                degenerate: degenerate && (pairing - C64::one()).norm() > 1e-6,
            }
        })
        .collect())
}

/// Eigenvalues only.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let cfg = EigConfig::default();
    if a.rows() > cfg.max_dim {
        return Err(Error::DimensionCap {
            dim: a.rows(),
            cap: cfg.max_dim,
        });
    }
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let (t, _) = schur(a, &cfg)?;
    Ok((0..a.rows()).map(|i| t[(i, i)]).collect())
}

/// Householder reduction `a = q h qᴴ` with `h` upper Hessenberg.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        let alpha = vec_norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::one()
        };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vn;
        }
        // h <- (I - 2vvᴴ) h (I - 2vvᴴ), acting on rows/cols k+1..n
        for col in 0..n {
            let mut s = C64::zero();
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, col)];
            }
            s = s * 2.0;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, col)] -= vi * s;
            }
        }
        for row in 0..n {
            let mut s = C64::zero();
            for (i, vi) in v.iter().enumerate() {
                s += h[(row, k + 1 + i)] * vi;
            }
            s = s * 2.0;
            for (i, vi) in v.iter().enumerate() {
                h[(row, k + 1 + i)] -= s * vi.conj();
            }
        }
        for row in 0..n {
            let mut s = C64::zero();
            for (i, vi) in v.iter().enumerate() {
                s += q[(row, k + 1 + i)] * vi;
            }
            s = s * 2.0;
            for (i, vi) in v.iter().enumerate() {
                q[(row, k + 1 + i)] -= s * vi.conj();
            }
        }
        for r in k + 2..n {
            h[(r, k)] = C64::zero();
        }
    }
    (h, q)
}

/// Givens rotation `[c s; -s̄ c]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::zero());
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let cs = an / r;
    let sn = (a / an) * b.conj() / r;
    (cs, sn)
}

fn wilkinson_shift(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * cc;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur form `a = z t zᴴ`.
fn schur(a: &ComplexMatrix, cfg: &EigConfig) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    let anorm = a.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = cfg.max_iter_per_value * n.max(1);

    while hi > 0 {
        // find the active window [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if diag == 0.0 { anorm } else { diag };
            if sub <= eps * scale {
                h[(lo, lo - 1)] = C64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if total_iter > budget {
            return Err(Error::NoConvergence {
                norm: anorm,
                iterations: total_iter,
            });
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            let s = h[(hi, hi - 1)].re.abs() + if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + C64::new(0.75 * s, 0.4375 * s)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for col in k..n {
                let x = h[(k, col)];
                let y = h[(k + 1, col)];
                h[(k, col)] = x * cs + sn * y;
                h[(k + 1, col)] = -sn.conj() * x + y * cs;
            }
            h[(k + 1, k)] = C64::zero();
            rots.push((cs, sn));
        }
        for (idx, &(cs, sn)) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for row in 0..=top {
                let x = h[(row, k)];
                let y = h[(row, k + 1)];
                h[(row, k)] = x * cs + y * sn.conj();
                h[(row, k + 1)] = -x * sn + y * cs;
            }
            for row in 0..n {
                let x = z[(row, k)];
                let y = z[(row, k + 1)];
                z[(row, k)] = x * cs + y * sn.conj();
                z[(row, k + 1)] = -x * sn + y * cs;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    for r in 1..n {
        for col in 0..r {
            h[(r, col)] = C64::zero();
        }
    }
    Ok((h, z))
}

/// Right eigenvectors of an upper-triangular matrix, as columns.
fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.rows();
    let norm = t.norm_fro();
    let smin = if norm > 0.0 { norm * f64::EPSILON } else { f64::EPSILON };
    let mut x = ComplexMatrix::zeros(n, n);
    let mut col = vec![C64::zero(); n];
    for k in 0..n {
        for z in col.iter_mut() {
            *z = C64::zero();
        }
        col[k] = C64::one();
        let lambda = t[(k, k)];
        for i in (0..k).rev() {
            let mut s = C64::zero();
            for j in i + 1..=k {
                s += t[(i, j)] * col[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            col[i] = -s / d;
        }
        x.set_col(k, &col);
    }
    x
}
