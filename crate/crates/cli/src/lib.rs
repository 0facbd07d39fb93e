//! Front end for `fluctua`: run configuration, artifact writers and the
//! acceptance suite.

pub mod acceptance;
pub mod config;
pub mod format;
pub mod run;
pub mod svg;

use fluctua_core::Error as CoreError;

/// Process exit status for each failure class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("acceptance check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::CheckFailed(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(m) | CoreError::InconsistentConfig(m) | CoreError::InvalidArgument(m) => {
                Self::Config(m)
            }
            other => Self::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("output: {e}"))
    }
}
