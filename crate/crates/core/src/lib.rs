//! Finite-difference schemes for the 1-D transport equation
//! `u_t + c·u_x = 0`, rewritten as the matrix equation
//! `M1·U + U·M2 + L(U) = M0` over the interior field `U`.
//!
//! The crate assembles that system for the nine-weight stencil family,
//! solves it with a Bartels-Stewart solver built on a from-scratch real
//! Schur decomposition, and carries the spectral, uniqueness and
//! minimum-norm error analysis used to pick the CFL number.

pub mod analysis;
pub mod assembly;
pub mod denselin;
pub mod error;
pub mod scheme;
pub mod sylvester;

pub use assembly::{FieldMatrix, FieldRole, SylvesterSystem};
pub use denselin::{frobenius_norm, DenseMatrix, SchurForm, SvdForm};
pub use error::{Error, Result};
pub use scheme::{BoundaryData, Grid, SchemeCoefficients, SchemeId, SignalSpec};
pub use sylvester::SylvesterSolveReport;
