use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The trajectory is (numerically) stationary, so the arc-length
    /// reparameterization is undefined.
    #[error("trajectory speed {speed:e} is at or below the threshold {threshold:e}")]
    ZeroSpeed { speed: f64, threshold: f64 },

    #[error("initial alignment is infeasible: tangent component {tangent_component:e} of the vortex axis is not positive")]
    Infeasible { tangent_component: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coefficient tensor error: {0}")]
    InvalidCoefficients(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("search dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("requested {n} quasi-random points, the generator supports at most {max}")]
    SequenceTooLong { n: usize, max: usize },

    #[error("no feasible trial in the history")]
    NoFeasibleHistory,

    #[error("determinant D = {d:e} is too close to zero")]
    SingularD { d: f64 },

    #[error("{}:{line}: corrupted trial log line: {reason}", path.display())]
    CorruptLog {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {reason}", path.display())]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
