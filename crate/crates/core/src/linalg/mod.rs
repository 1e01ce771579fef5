//! Small direct solvers for the structured systems of the radial scheme.
//!
//! Every per-mode operator is symmetric once multiplied by the cell volumes,
//! so the kernels here only handle symmetric (tridiagonal or pentadiagonal)
//! matrices.

mod banded;
mod eigen;
mod tridiag;

pub use banded::{PentadiagonalCholesky, SymmetricPentadiagonal};
pub use eigen::{symmetric_tridiagonal_eigen, ShiftedFactor, SturmLiouville, TridiagonalEigen};
pub use tridiag::{SymmetricTridiagonal, TridiagonalFactor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("singular pivot at row {0}")]
    Singular(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}
