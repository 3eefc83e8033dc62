use ibnls_core::{ContainerError, GroundStateError, SetupError};
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Input is valid but outside a study's hypotheses.
    #[error("refused: {0}")]
    Refused(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("field file: {0}")]
    Container(#[from] ContainerError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl LabError {
    /// 1 validation, 2 I/O, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(ConfigError::Io { .. }) => 2,
            LabError::Config(_) | LabError::Refused(_) => 1,
            LabError::Io(_) | LabError::Container(_) => 2,
            LabError::Internal(_) => 3,
        }
    }
}

impl From<SetupError> for LabError {
    fn from(e: SetupError) -> Self {
        LabError::Internal(e.to_string())
    }
}

impl From<GroundStateError> for LabError {
    fn from(e: GroundStateError) -> Self {
        LabError::Internal(format!("ground state: {e}"))
    }
}
