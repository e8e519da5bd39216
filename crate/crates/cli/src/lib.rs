//! Experiment driver behind the `szego` binary: config parsing, sweeps,
//! factorization reports and seeded verification suites.

pub mod commands;
pub mod config;
pub mod verify;

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Math(szego_core::Error),
    #[error("verification failed: {0} failing trial(s)")]
    VerifyFailed(usize),
}

impl From<szego_core::Error> for CliError {
    fn from(e: szego_core::Error) -> Self {
        match e {
            szego_core::Error::InvalidInput(msg) => Self::Config(msg),
            other => Self::Math(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::VerifyFailed(_) => 1,
            Self::Config(_) | Self::Io(_) => 2,
            Self::Math(_) => 3,
        })
    }
}
