//! Library side of the `radbkg` command-line tool, kept separate from
//! `main.rs` so the commands can be driven from tests.

pub mod commands;
pub mod config;
pub mod units;

use std::fmt;
use std::path::PathBuf;

pub use commands::{run, Cli};
pub use config::{Config, ConfigError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const RUNTIME: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Usage(String),
    Runtime(radbkg::error::Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => exit::CONFIG,
            CliError::Runtime(radbkg::error::Error::Io(_)) | CliError::Runtime(radbkg::error::Error::Parse { .. }) => {
                exit::IO
            }
            CliError::Runtime(_) => exit::RUNTIME,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
            CliError::Runtime(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<radbkg::error::Error> for CliError {
    fn from(e: radbkg::error::Error) -> Self {
        CliError::Runtime(e)
    }
}
