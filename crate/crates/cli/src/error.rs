use std::path::PathBuf;

use react_core::ReactError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: u64,
        message: String,
    },
    #[error("invalid value for {flag}: {message}")]
    Config { flag: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] ReactError),
}

impl CliError {
    pub fn config(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Config {
            flag,
            message: message.into(),
        }
    }

    /// 2 for bad input or configuration, 3 when valid input could not be computed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_computation_failure(e) => 3,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Config { .. } | CliError::Core(_) => 2,
        }
    }
}

fn is_computation_failure(e: &ReactError) -> bool {
    matches!(
        e,
        ReactError::DegenerateVariance(_)
            | ReactError::NotPositiveDefinite
            | ReactError::EmptyRegion
            | ReactError::GridNotStraddling
            | ReactError::UnsupportedPair { .. }
            | ReactError::MixedRegions
    )
}

pub type CliResult<T> = Result<T, CliError>;
