use thiserror::Error;

/// Errors raised by the geometry, flow and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The matrix left the SPD cone, or sits too close to its boundary for the
    /// geometry to be evaluated reliably.
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SPD violation at step {step}, voxel {voxel} (min eigenvalue {min_eigenvalue:e})")]
    SpdViolation {
        step: usize,
        voxel: usize,
        min_eigenvalue: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
