use thiserror::Error;

/// Failures mapped onto process exit codes.
///
/// | code | meaning |
/// |------|---------|
/// | 0 | success |
/// | 2 | invalid input: job file, flags, field or scene |
/// | 3 | numerical or geometric degeneracy, failed self-check |
/// | 4 | file could not be read or written |
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<tetcut_core::Error> for CliError {
    fn from(e: tetcut_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
