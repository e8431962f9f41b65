use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] rabi_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use rabi_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Json { .. } => EXIT_CONFIG,
            CliError::Model(E::InvalidParameter(_) | E::DimensionMismatch { .. }) => EXIT_CONFIG,
            CliError::Model(E::Truncation { .. }) => EXIT_TRUNCATION,
            CliError::Model(E::NonConvergence { .. }) => EXIT_NON_CONVERGENCE,
            CliError::Model(_) | CliError::Io { .. } | CliError::Csv { .. } => EXIT_FAILURE,
        }
    }
}
