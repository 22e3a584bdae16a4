use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::eig::eigenvalues;
use super::matrix::{ComplexMatrix, C64};
use crate::{Error, Result};

/// Polynomial coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs(pub Vec<C64>);

impl PolyCoeffs {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self(coeffs)
    }

    /// Monic polynomial `Π (y − rᵢ)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = vec![C64::one()];
        for &r in roots {
            let mut next = vec![C64::zero(); p.len() + 1];
            for (i, &a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        Self(p)
    }

    /// Drops vanishing leading coefficients.
    pub fn trimmed(&self) -> Self {
        let mut v = self.0.clone();
        while v.len() > 1 && v.last().map_or(false, |z| *z == C64::zero()) {
            v.pop();
        }
        Self(v)
    }

    pub fn degree(&self) -> usize {
        self.trimmed().0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn eval(&self, y: C64) -> C64 {
        self.0.iter().rev().fold(C64::zero(), |acc, &a| acc * y + a)
    }

    fn eval_with_derivative(&self, y: C64) -> (C64, C64) {
        let mut p = C64::zero();
        let mut dp = C64::zero();
        for &a in self.0.iter().rev() {
            dp = dp * y + p;
            p = p * y + a;
        }
        (p, dp)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Result<Self> {
        let t = self.trimmed();
        let lead = *t.0.last().ok_or(Error::ZeroPolynomial)?;
        if lead == C64::zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self(t.0.iter().map(|z| z / lead).collect()))
    }

    pub fn max_coeff(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Roots from the eigenvalues of the companion matrix, followed by a couple of
/// Newton polishing steps on the original polynomial.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<C64>> {
    let m = p.monic()?;
    let n = m.0.len() - 1;
    if n == 0 {
        return Err(Error::ZeroPolynomial);
    }
    let mut comp = ComplexMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C64::one();
    }
    for i in 0..n {
        comp[(i, n - 1)] = -m.0[i];
    }
    let mut roots = eigenvalues(&comp)?;
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (f, df) = m.eval_with_derivative(*r);
            if df == C64::zero() {
                break;
            }
            let step = f / df;
            let cand = *r - step;
            if m.eval(cand).norm() < f.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}
