//! Exit-code contract: 0 success, 2 configuration or validation error,
//! 3 data or numeric error.

use qparity::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config keys, bad parameter values. Exit 2.
    Usage(String),
    /// Bad input data or a numeric failure at run time. Exit 3.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Usage(e.0)
    }
}

/// Toolkit errors signalled while processing data are data errors; parameter
/// validation failures are usage errors.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
