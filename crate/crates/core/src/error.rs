use thiserror::Error;

/// Errors raised by mesh construction, space setup, assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh load error (line {line}): {message}")]
    MeshLoad { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("linear solve did not converge: relative residual {residual:.3e} exceeds {tolerance:.1e}")]
    NonConvergence { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
