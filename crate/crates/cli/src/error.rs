use std::path::PathBuf;

use taks_core::learner::IdxError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad config file, flag or parameter. Exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// Input data could not be read or is malformed. Exit code 2.
    #[error("data error: {0}")]
    Data(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Data(_) | HarnessError::Output { .. } => 2,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        HarnessError::Data(msg.into())
    }
}

/// Parameter and dimension problems are configuration mistakes; anything
/// that complains about values in the input is a data problem.
impl From<taks_core::Error> for HarnessError {
    fn from(e: taks_core::Error) -> Self {
        match e {
            taks_core::Error::Input(_) => HarnessError::Data(e.to_string()),
            _ => HarnessError::Config(e.to_string()),
        }
    }
}

impl From<IdxError> for HarnessError {
    fn from(e: IdxError) -> Self {
        HarnessError::Data(e.to_string())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
