//! Dense complex linear algebra used throughout the crate.

mod eig;
mod matrix;
mod poly;
mod solve;
pub mod tensor;

pub use eig::{eig, eig_with, eigenvalues, EigConfig, EigenTriple};
pub use matrix::{c, kron, kron_all, vdot, vec_norm, ComplexMatrix, C64};
pub use poly::{poly_roots, PolyCoeffs};
pub use solve::{
    det, inverse, least_squares_residual, null_vector, pseudo_inverse, singular_values, solve,
    svd, Lu, Svd,
};
