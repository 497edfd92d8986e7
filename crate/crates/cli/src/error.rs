//! CLI error type with the documented exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 2: bad configuration, flags or paths.
    #[error("config error: {0}")]
    Config(String),
    /// Exit code 3: a requested constraint cannot be met.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Exit code 4: numerical failure in the pipeline.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        Self::Config(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Infeasible(_) => 3,
            Self::Numerical(_) => 4,
        }
    }
}

impl From<heraldsim::Error> for CliError {
    fn from(e: heraldsim::Error) -> Self {
        match e {
            heraldsim::Error::InvalidInput(m) => Self::Config(m),
            heraldsim::Error::Infeasible(m) => Self::Infeasible(m),
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("i/o: {e}"))
    }
}
