//! Operators acting on a few factors of a tensor-product space.
//!
//! A composite space is described by its factor dimensions, most significant
//! factor first. A local operator acts on an ordered list of distinct factors;
//! its own index is the mixed-radix number of those factors' digits in the
//! order given.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::matrix::{ComplexMatrix, C64};

struct Layout {
    total: usize,
    local_dim: usize,
    /// For each global index: its local digit index and the global index with
    /// the local digits zeroed.
    split: Vec<(usize, usize)>,
    /// Global offset contributed by each local index.
    offsets: Vec<usize>,
}

impl Layout {
    fn new(dims: &[usize], sites: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        for (i, &s) in sites.iter().enumerate() {
            assert!(s < dims.len(), "site out of range");
            assert!(!sites[..i].contains(&s), "sites must be distinct");
        }
        let local_dim: usize = sites.iter().map(|&s| dims[s]).product();
        let offsets: Vec<usize> = (0..local_dim)
            .map(|mut l| {
                let mut off = 0;
                for &s in sites.iter().rev() {
                    off += (l % dims[s]) * strides[s];
                    l /= dims[s];
                }
                off
            })
            .collect();
        let split = (0..total)
            .map(|g| {
                let mut loc = 0;
                let mut base = g;
                for &s in sites {
                    let digit = (g / strides[s]) % dims[s];
                    loc = loc * dims[s] + digit;
                    base -= digit * strides[s];
                }
                (loc, base)
            })
            .collect();
        Self {
            total,
            local_dim,
            split,
            offsets,
        }
    }
}

fn check(op: &ComplexMatrix, layout: &Layout) {
    assert!(op.is_square(), "local operator must be square");
    assert_eq!(
        op.rows(),
        layout.local_dim,
        "local operator dimension must match the selected factors"
    );
}

/// `x · embed(op)`.
pub fn mul_local_right(
    x: &ComplexMatrix,
    op: &ComplexMatrix,
    dims: &[usize],
    sites: &[usize],
) -> ComplexMatrix {
    let layout = Layout::new(dims, sites);
    check(op, &layout);
    assert_eq!(x.cols(), layout.total);
    let d = layout.local_dim;
    let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
    // Column c of the result gathers the columns c' sharing c's non-local digits.
    let gather: Vec<(usize, Vec<(usize, C64)>)> = (0..layout.total)
        .map(|col| {
            let (loc, base) = layout.split[col];
            let terms = (0..d)
                .filter_map(|lp| {
                    let w = op[(lp, loc)];
                    (w != C64::zero()).then(|| (base + layout.offsets[lp], w))
                })
                .collect();
            (col, terms)
        })
        .collect();
    for r in 0..x.rows() {
        let xr = x.row(r);
        let dst = &mut out.as_mut_slice()[r * layout.total..(r + 1) * layout.total];
        for (col, terms) in &gather {
            let mut acc = C64::zero();
            for &(src, w) in terms {
                acc += xr[src] * w;
            }
            dst[*col] = acc;
        }
    }
    out
}

/// `embed(op) · x`.
pub fn mul_local_left(
    op: &ComplexMatrix,
    x: &ComplexMatrix,
    dims: &[usize],
    sites: &[usize],
) -> ComplexMatrix {
    let layout = Layout::new(dims, sites);
    check(op, &layout);
    assert_eq!(x.rows(), layout.total);
    let d = layout.local_dim;
    let n = x.cols();
    let mut out = ComplexMatrix::zeros(x.rows(), n);
    for r in 0..layout.total {
        let (loc, base) = layout.split[r];
        for lp in 0..d {
            let w = op[(loc, lp)];
            if w == C64::zero() {
                continue;
            }
            let src_row = x.row(base + layout.offsets[lp]);
            let dst = &mut out.as_mut_slice()[r * n..(r + 1) * n];
            for (o, &v) in dst.iter_mut().zip(src_row) {
                *o += w * v;
            }
        }
    }
    out
}

/// The full operator `op` acting on `sites`, identity elsewhere.
pub fn embed(op: &ComplexMatrix, dims: &[usize], sites: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    mul_local_right(&ComplexMatrix::identity(total), op, dims, sites)
}

/// Traces out the first factor of a space `d_first ⊗ rest`.
pub fn partial_trace_first(x: &ComplexMatrix, d_first: usize) -> ComplexMatrix {
    assert!(x.is_square());
    assert_eq!(x.rows() % d_first, 0);
    let rest = x.rows() / d_first;
    let mut out = ComplexMatrix::zeros(rest, rest);
    for a in 0..d_first {
        for r in 0..rest {
            for col in 0..rest {
                out[(r, col)] += x[(a * rest + r, a * rest + col)];
            }
        }
    }
    out
}

/// Permutation operator on `n` qubits sending the state of qubit `i` to
/// qubit `perm[i]`.
pub fn qubit_permutation(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for src in 0..dim {
        let mut dst = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            let bit = (src >> (n - 1 - i)) & 1;
            dst |= bit << (n - 1 - p);
        }
        out[(dst, src)] = C64::new(1.0, 0.0);
    }
    out
}

/// Transposition 𝒫_{a,b} on `n` qubits (0-based); 𝒫_{a,a} is the identity.
pub fn transposition(n: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(a, b);
    qubit_permutation(&perm)
}
