//! H-matrix certification and Sassenfeld index analysis.
//!
//! - [`matrix`]: dense complex/real matrices, splittings, direct solves and
//!   spectral radius estimates for nonnegative matrices.
//! - [`hmatrix`]: comparison matrices and H-matrix certificates.
//! - [`sassenfeld`]: the Sassenfeld vector and index, iterative upper
//!   bounds, norm, invertibility and condition-number bounds.
//! - [`equivalence`]: generalized diagonal dominance certificates built
//!   from Sassenfeld pairs.
//! - [`splitting`]: Jacobi / Gauss-Seidel / custom preconditioners and the
//!   stationary iteration with a priori error bounds.

#![allow(clippy::needless_range_loop)]

pub mod equivalence;
pub mod error;
pub mod hmatrix;
pub mod matrix;
pub mod sassenfeld;
pub mod splitting;

pub use error::{Error, Result};
pub use hmatrix::{certify_h, comparison_matrix, ComparisonMatrix, HCertificate, HVerdict};
pub use matrix::{ComplexMatrix, NonNegMatrix, RealMatrix, RealVector, C64};
pub use sassenfeld::{sassenfeld_index, sassenfeld_vector, SassenfeldReport};
pub use splitting::{fdm_matrix, make_preconditioner, Preconditioner, PreconditionerKind};
