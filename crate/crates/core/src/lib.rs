//! Commuting transfer matrices of the open spin-s XXZ chain with general
//! (non-diagonal) integrable boundaries, together with the Bethe Ansatz
//! machinery that labels every transfer-matrix eigenvalue by Bethe roots.
//!
//! The crate is `no_std` (with `alloc`). Layout, bottom-up:
//!
//! * [`linalg`]: dense complex matrices, eigen/SVD/root solvers.
//! * [`fusion`]: fundamental and fused R-matrices, symmetrizers, and the
//!   projector identities behind the fusion hierarchy ([`appendix`]).
//! * [`boundary`]: fundamental and fused K-matrices.
//! * [`transfer`]: monodromies, transfer matrices, fusion hierarchy and
//!   spectrum extraction.
//! * [`bethe`]: T–Q functions, constraint, Q-polynomial fitting, Bethe
//!   equations and sector classification.
//! * [`spin1`]: the explicit spin-1 Hamiltonian and its energy formula.
//! * [`suite`]: verification suites and table drivers.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod appendix;
pub mod bethe;
pub mod boundary;
pub mod fusion;
pub mod linalg;
pub mod spin1;
pub mod suite;
pub mod transfer;

mod hyp;
mod xprec;

pub use hyp::{ch, sh, xi};
pub use linalg::{c, ComplexMatrix, C64};

/// Default cap on the dimension of any matrix handed to the eigensolver.
pub const DEFAULT_MAX_DIM: usize = 256;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
    #[error("QR iteration did not converge after {iterations} iterations (matrix norm {norm:e})")]
    NoConvergence { norm: f64, iterations: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("pole of {what} at u = {at}")]
    Pole { what: &'static str, at: C64 },
    #[error("M = {twice_m}/2 is not an integer for this (N, s, k)")]
    Parity { twice_m: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("singular Jacobian in Newton refinement")]
    SingularJacobian,
    #[error("construction inconsistency: residual {residual:e} exceeds {tolerance:e}")]
    Inconsistent { residual: f64, tolerance: f64 },
}
