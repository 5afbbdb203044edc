//! Command-line front end for the `fqrigid` library: one subcommand per
//! experiment, a shared JSON report envelope and CSV export for audits.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::io::Write;
use std::time::Instant;

pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
pub use report::{read_report, write_report, Report, ViolationSummary, SCHEMA_VERSION};

/// Exit status for errors in the arguments or the computation.
pub const EXIT_ERROR: i32 = 2;

/// Runs a validated configuration and writes the JSON report if asked to.
pub fn run(config: &ExperimentConfig) -> Result<(Report, Vec<String>), CliError> {
    let start = Instant::now();
    let outcome = commands::execute(config)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: config.name().to_string(),
        config: config.clone(),
        payload: outcome.payload,
        wall_time_ms: start.elapsed().as_millis() as u64,
        violations: ViolationSummary(outcome.violations),
    };
    if let Some(path) = &config.out {
        write_report(&report, path)?;
    }
    Ok((report, outcome.summary))
}

/// Parses, runs and prints; returns the process exit status: 0 when the
/// violation summary is "none", 1 when it is not, 2 on errors.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(args).and_then(|config| run(&config));
    match result {
        Ok((report, summary)) => {
            let _ = writeln!(stdout, "{}", report.command);
            for line in &summary {
                let _ = writeln!(stdout, "  {line}");
            }
            let _ = writeln!(stdout, "  wall time {} ms", report.wall_time_ms);
            if report.violations.is_none() {
                let _ = writeln!(stdout, "violations: none");
            } else {
                let _ = writeln!(stdout, "violations: {}", report.violations.0.len());
                for v in &report.violations.0 {
                    let _ = writeln!(stdout, "  {v}");
                }
            }
            report.exit_code()
        }
        Err(CliError::Help(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(CliError::Usage(text)) => {
            let _ = write!(stderr, "{text}");
            EXIT_ERROR
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
