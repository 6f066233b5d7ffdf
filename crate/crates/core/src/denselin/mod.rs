//! Dense real linear algebra used by the Sylvester solver and the
//! minimum-norm analysis. Sized for matrices up to a few hundred rows.

mod lu;
mod matrix;
mod schur;
mod svd;

pub use lu::{determinant, solve_linear, solve_tridiagonal, tridiag_det, Lu};
pub use matrix::{frobenius_norm, DenseMatrix};
pub use schur::{eigenvalues, hessenberg, real_schur, SchurForm, SchurOptions};
pub use svd::{svd, SvdForm};

pub(crate) use schur::diagonal_blocks;

/// Default relative tolerance for Jacobi SVD sweeps.
pub const SVD_TOL: f64 = 1e-15;
