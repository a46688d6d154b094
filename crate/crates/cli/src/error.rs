use netshare::Error as CoreError;

/// Failure classes, each with a stable process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::ResourceLimitExceeded { .. } => CliError::Resource(err.to_string()),
            CoreError::NonUnitalComponent
            | CoreError::ImaginaryResidualExceeded(_)
            | CoreError::ZeroProbabilityBranch(_)
            | CoreError::DegenerateDirection(_)
            | CoreError::NotFactorized(_) => CliError::Invariant(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(err.to_string())
    }
}
