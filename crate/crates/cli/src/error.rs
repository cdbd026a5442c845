use thiserror::Error;

/// Failures surfaced to the shell, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<mcsel::Error> for CliError {
    fn from(e: mcsel::Error) -> Self {
        match e {
            mcsel::Error::UnknownPolicy { .. }
            | mcsel::Error::UnknownActivation(_)
            | mcsel::Error::UnknownAggregation(_) => CliError::Config(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
