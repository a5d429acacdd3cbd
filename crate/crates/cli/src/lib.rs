//! Experiment harness around `coalesce-core`: TOML manifests, the four
//! reproduction presets, CSV emission and the verification suites.

pub mod commands;
pub mod manifest;
pub mod plot;
pub mod presets;
pub mod suite;

use std::path::PathBuf;

use coalesce_core::Error as CoreError;

/// Environment variable naming the directory under which runs are written.
pub const OUTPUT_ROOT_VAR: &str = "COALESCE_OUTPUT";
pub const DEFAULT_OUTPUT_ROOT: &str = "coalesce-output";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 verification failure, 2 bad input, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BlowUp { .. } | CoreError::Oscillation { .. } | CoreError::SingularSystem(_) => {
                CliError::Numerical(e.to_string())
            }
            CoreError::Io(io) => CliError::Io(io),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
