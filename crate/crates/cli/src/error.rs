use std::fmt;

/// Failures mapped to exit codes: usage and configuration errors exit 2,
/// failed checks and runtime errors exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dunkl::Error> for CliError {
    fn from(e: dunkl::Error) -> Self {
        Self::Failure(e.to_string())
    }
}
