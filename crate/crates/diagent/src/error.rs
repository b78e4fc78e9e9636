use diagent_core::Error as CoreError;

/// Failures surfaced by the command line, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::SizeLimit { .. } => CliError::Config(e.to_string()),
            CoreError::Numeric(_) | CoreError::Unconverged { .. } => CliError::Numeric(e.to_string()),
        }
    }
}
