use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("{command} needs a value for {key}")]
    MissingValue { key: String, command: String },
    #[error("config line {line} is not `key = value`: {text:?}")]
    ConfigSyntax { line: usize, text: String },
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version` output.
    #[error("{0}")]
    Help(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] fqrigid::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub(crate) fn from_clap(err: clap::Error) -> Self {
        use clap::error::{ContextKind, ErrorKind};
        match err.kind() {
            ErrorKind::InvalidSubcommand => {
                let name = err.get(ContextKind::InvalidSubcommand).map(|v| v.to_string()).unwrap_or_default();
                CliError::UnknownCommand(name)
            }
            ErrorKind::ValueValidation | ErrorKind::InvalidValue => {
                let key = err
                    .get(ContextKind::InvalidArg)
                    .map(|v| v.to_string().trim_start_matches('-').split(' ').next().unwrap_or("").to_string())
                    .unwrap_or_default();
                let value = err.get(ContextKind::InvalidValue).map(|v| v.to_string()).unwrap_or_default();
                CliError::InvalidValue { key, value, reason: err.kind().to_string() }
            }
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(err.render().to_string()),
            _ => CliError::Usage(err.render().to_string()),
        }
    }
}
