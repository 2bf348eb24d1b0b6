use kmkdv_core::{Error, ErrorCategory};
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{category} error: {source}")]
    Core { category: &'static str, source: Error },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let category = match e.category() {
            ErrorCategory::Validation => "validation",
            ErrorCategory::Pole => "pole",
            ErrorCategory::Instability => "instability",
        };
        CliError::Core { category, source: e }
    }
}

impl CliError {
    /// 0 success, 2 validation, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core { source, .. } if source.category() == ErrorCategory::Validation => 2,
            _ => 3,
        }
    }
}
