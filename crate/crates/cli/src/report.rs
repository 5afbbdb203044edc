//! The report envelope shared by every command.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// `"none"` on the wire when empty, otherwise the list of messages.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationSummary(pub Vec<String>);

impl ViolationSummary {
    pub fn is_none(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for ViolationSummary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_empty() {
            s.serialize_str("none")
        } else {
            self.0.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ViolationSummary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Word(String),
            List(Vec<String>),
        }
        match Wire::deserialize(d)? {
            Wire::Word(w) if w == "none" => Ok(ViolationSummary(Vec::new())),
            Wire::Word(w) => Err(serde::de::Error::custom(format!("expected \"none\" or a list, got {w:?}"))),
            Wire::List(v) => Ok(ViolationSummary(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub payload: serde_json::Value,
    pub wall_time_ms: u64,
    pub violations: ViolationSummary,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_none() {
            0
        } else {
            1
        }
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_report(path: &Path) -> Result<Report, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
