use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INVARIANT: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CAPACITY: u8 = 3;
    pub const IO: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tenpca_core::Error),

    #[error("{0}")]
    Usage(String),

    /// One or more invariant checks failed.
    #[error("{0}")]
    Invariant(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        use tenpca_core::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Invariant(_) => exit::INVARIANT,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                E::Index { .. } | E::Dimension(_) | E::Argument(_) => exit::USAGE,
                E::NotSelfAdjoint { .. } | E::Convergence { .. } => exit::INVARIANT,
                E::Capacity { .. } => exit::CAPACITY,
                E::Format { .. } | E::Ingestion { .. } | E::Io { .. } => exit::IO,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
