//! CLI error classes and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] rwpnet::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("validation gate failed: {0}")]
    Gate(String),
}

impl CliError {
    /// Exit status: 2 config, 3 numeric convergence, 4 validation gate,
    /// 5 i/o. Clap reports usage errors with status 2 on its own.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                rwpnet::Error::QuadratureDidNotConverge { .. }
                | rwpnet::Error::SeriesDidNotConverge { .. } => 3,
                _ => 2,
            },
            CliError::Io(_) => 5,
            CliError::Gate(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
