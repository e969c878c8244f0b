//! Error taxonomy mapped onto process exit codes: validation problems
//! (bad config, malformed input, missing upstream artifacts) exit 2,
//! exceeding the endpoint failure budget exits 3, anything unexpected
//! exits 1.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("endpoint failure budget exceeded: {0}")]
    EndpointBudget(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::EndpointBudget(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<inquest_core::corpus::CorpusError> for CliError {
    fn from(e: inquest_core::corpus::CorpusError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::corpus::MatrixError> for CliError {
    fn from(e: inquest_core::corpus::MatrixError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::eval::EvalError> for CliError {
    fn from(e: inquest_core::eval::EvalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::classifiers::FitError> for CliError {
    fn from(e: inquest_core::classifiers::FitError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::stability::StabilityError> for CliError {
    fn from(e: inquest_core::stability::StabilityError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::agreement::AgreementError> for CliError {
    fn from(e: inquest_core::agreement::AgreementError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::diversity::DiversityError> for CliError {
    fn from(e: inquest_core::diversity::DiversityError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<inquest_core::elicit::ElicitError> for CliError {
    fn from(e: inquest_core::elicit::ElicitError) -> Self {
        match &e {
            inquest_core::elicit::ElicitError::BudgetExceeded { .. } => {
                CliError::EndpointBudget(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}
