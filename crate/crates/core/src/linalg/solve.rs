use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::matrix::{vdot, vec_norm, ComplexMatrix, C64};

/// LU factorization with partial pivoting, stored compactly.
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot vanishes.
    pub fn new(a: &ComplexMatrix) -> Option<Self> {
        assert!(a.is_square());
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.norm_max();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[(r, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= scale * f64::EPSILON * 1e-3 || pmax == 0.0 {
                return None;
            }
            if p != k {
                for col in 0..n {
                    let t = lu[(k, col)];
                    lu[(k, col)] = lu[(p, col)];
                    lu[(p, col)] = t;
                }
                perm.swap(k, p);
            }
            let piv = lu[(k, k)];
            for r in k + 1..n {
                let f = lu[(r, k)] / piv;
                lu[(r, k)] = f;
                if f == C64::zero() {
                    continue;
                }
                for col in k + 1..n {
                    let u = lu[(k, col)];
                    lu[(r, col)] -= f * u;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.rows();
        let mut d = C64::one();
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        // parity of the permutation
        let mut seen = alloc::vec![false; n];
        let mut sign = 1.0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        d * sign
    }
}

pub fn solve(a: &ComplexMatrix, b: &[C64]) -> Option<Vec<C64>> {
    Lu::new(a).map(|lu| lu.solve(b))
}

pub fn inverse(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let lu = Lu::new(a)?;
    let n = a.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut e = alloc::vec![C64::zero(); n];
    for col in 0..n {
        e.iter_mut().for_each(|z| *z = C64::zero());
        e[col] = C64::one();
        inv.set_col(col, &lu.solve(&e));
    }
    Some(inv)
}

/// Determinant by Gaussian elimination; zero for singular input.
pub fn det(a: &ComplexMatrix) -> C64 {
    Lu::new(a).map(|lu| lu.det()).unwrap_or_else(C64::zero)
}

/// Thin singular value decomposition `a = u·diag(s)·vᴴ` for `rows ≥ cols`,
/// computed by one-sided Jacobi rotations.
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = f64::EPSILON * 2.0;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::zero();
                for r in 0..m {
                    let ap = w[(r, p)];
                    let aq = w[(r, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ph_c = phase.conj();
                for r in 0..m {
                    let ap = w[(r, p)];
                    let aq = w[(r, q)] * ph_c;
                    w[(r, p)] = ap * cs - aq * sn;
                    w[(r, q)] = ap * sn + aq * cs;
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)] * ph_c;
                    v[(r, p)] = vp * cs - vq * sn;
                    v[(r, q)] = vp * sn + vq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s = Vec::with_capacity(n);
    let mut u = ComplexMatrix::zeros(m, n);
    for col in 0..n {
        let c = w.col_vec(col);
        let nrm = vec_norm(&c);
        s.push(nrm);
        if nrm > 0.0 {
            let unit: Vec<C64> = c.iter().map(|z| z / nrm).collect();
            u.set_col(col, &unit);
        }
    }
    Svd { u, s, v }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s = svd(a).s;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    s
}

/// Unit vector minimizing `‖a·c‖` together with the achieved residual.
pub fn null_vector(a: &ComplexMatrix) -> (Vec<C64>, f64) {
    assert!(a.rows() >= a.cols(), "null_vector expects rows >= cols");
    let d = svd(a);
    let (idx, _) = d
        .s
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
    let vec = d.v.col_vec(idx);
    let residual = vec_norm(&a.mul_vec(&vec));
    (vec, residual)
}

/// Moore–Penrose inverse with singular values below `rel_cut·s_max` dropped.
pub fn pseudo_inverse(a: &ComplexMatrix, rel_cut: f64) -> ComplexMatrix {
    let d = svd(a);
    let smax = d.s.iter().cloned().fold(0.0, f64::max);
    let mut out = ComplexMatrix::zeros(a.cols(), a.rows());
    for (k, &sk) in d.s.iter().enumerate() {
        if sk <= rel_cut * smax || sk == 0.0 {
            continue;
        }
        for i in 0..a.cols() {
            let vik = d.v[(i, k)];
            for j in 0..a.rows() {
                out[(i, j)] += vik * d.u[(j, k)].conj() / sk;
            }
        }
    }
    out
}

/// Minimum of `‖b − a·x‖` over `x`, by projecting `b` onto an orthonormal basis
/// of `a`'s column space built with re-orthogonalized Gram–Schmidt.
/// Columns whose remaining norm falls below `drop_tol` times their original
/// norm are treated as dependent.
pub fn least_squares_residual(columns: &[Vec<C64>], b: &[C64], drop_tol: f64) -> f64 {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for col in columns {
        let n0 = vec_norm(col);
        if n0 == 0.0 {
            continue;
        }
        let mut w = col.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = vdot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= p * qi;
                }
            }
        }
        let nw = vec_norm(&w);
        if nw > drop_tol * n0 {
            basis.push(w.into_iter().map(|z| z / nw).collect());
        }
    }
    let mut r = b.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let p = vdot(q, &r);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= p * qi;
            }
        }
    }
    vec_norm(&r)
}
