//! Dense linear algebra used by the spectral checks.

mod eigen;
pub mod exact;
mod matrix;
mod svd;

pub use eigen::eigenvalues;
pub use matrix::{kron, unvec, vec, Matrix};
pub use svd::{rank, singular_values};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {0:?}")]
    NotSquare((usize, usize)),
    #[error("rows have different lengths")]
    Ragged,
    #[error("non-finite entry")]
    NonFinite,
    #[error("QR iteration did not converge ({remaining} eigenvalues left after {iterations} sweeps)")]
    NoConvergence { remaining: usize, iterations: usize },
}
