use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A multi-index component or linear index outside its range.
    #[error("index out of range{}: {index} not in 1..={extent}", mode.map(|m| format!(" in mode {m}")).unwrap_or_default())]
    Index {
        mode: Option<usize>,
        index: usize,
        extent: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// An operator that must be self-adjoint is not, within tolerance.
    #[error(
        "operator is not self-adjoint: max asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}"
    )]
    NotSelfAdjoint { asymmetry: f64, tolerance: f64 },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    Convergence { sweeps: usize, residual: f64 },

    #[error("capacity exceeded: {what} needs {required_bytes} bytes, cap is {cap_bytes} bytes")]
    Capacity {
        what: String,
        required_bytes: u128,
        cap_bytes: u128,
    },

    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    #[error("failed to decode {}: {msg}", path.display())]
    Ingestion { path: PathBuf, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
