use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by matrix construction, the reduction kernel, the ascent
/// step, and file ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("radicand {radicand} lies on the branch cut at angle {theta0}")]
    RadicandOnCut { radicand: num_complex::Complex64, theta0: f64 },

    #[error("selected eigenvalue is (numerically) a double root; 2*lambda = a + d")]
    DegenerateEigenvalue,

    #[error("projected ascent direction vanishes")]
    ZeroGradient,

    #[error("Hausdorff distance of an empty set")]
    EmptySet,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("split index {split} out of range for a {dim}x{dim} matrix")]
    SplitOutOfRange { split: usize, dim: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
