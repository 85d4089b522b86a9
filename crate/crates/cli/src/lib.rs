//! Library surface of the workbench CLI: experiment cases, configuration,
//! command implementations, and report writers. The binary in `main.rs` is a
//! thin argument-parsing shell over these functions so the test suites can
//! drive the exact same paths.

pub mod cases;
pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments; exit code 2.
    #[error("{0}")]
    Config(String),
    /// Numerical or I/O failure while running; exit code 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<amrbench_core::fem::FemError> for CliError {
    fn from(e: amrbench_core::fem::FemError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<amrbench_core::env::EnvError> for CliError {
    fn from(e: amrbench_core::env::EnvError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<amrbench_core::rl::FormatError> for CliError {
    fn from(e: amrbench_core::rl::FormatError) -> Self {
        CliError::Config(e.to_string())
    }
}
