//! Command-line and file configuration.
//!
//! Every option can come from a flag or from a flat `key = value` file given
//! with `--config`. Flags win over the file; keys the command does not know
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Comma-separated list of integers, e.g. `0,1,2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct U32List(pub Vec<u32>);

impl FromStr for U32List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(U32List(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(U32List)
    }
}

impl fmt::Display for U32List {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    Weil,
    Cor22,
    Cor23,
    Rou,
}

impl FromStr for AuditMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <AuditMode as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueModeArg {
    Verify,
    Catalog,
}

impl FromStr for CliqueModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <CliqueModeArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Parser, Clone, Debug)]
#[command(name = "fqrigid", version, about = "Rigidity experiments over finite fields")]
pub struct Cli {
    /// Flat `key = value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a CSV table (character-sum audits) here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads for the parallel searches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Modulus, generator and subfields of F_{p^n}.
    FieldInfo(FieldInfoArgs),
    /// Direction set of a linearized map or of a value table.
    Directions(DirectionsArgs),
    /// Additive maps with all directions in a coset union.
    Rigidity(RigidityArgs),
    /// Every function with few directions is additive (tiny q).
    DirectionsTheorem(TheoremArgs),
    /// Character-sum audits.
    Charsum(CharsumArgs),
    /// Cliques of size q through 0 and 1 in a Cayley graph on F_{q^2}.
    Clique(CliqueArgs),
    /// Reproduce the map x + u x^5 on F_25.
    ExampleF25(EmptyArgs),
    /// Run the command named by the `command` key of the config file.
    Run(EmptyArgs),
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct EmptyArgs {}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct FieldInfoArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// List every element with its polynomial form and discrete log.
    #[arg(long)]
    pub elements: bool,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct DirectionsArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Coefficients c_0..c_{n-1} of sum c_i x^(p^i), as encodings.
    #[arg(long)]
    pub coeffs: Option<U32List>,
    /// Values f(0), f(1), ..., f(q-1), as encodings.
    #[arg(long)]
    pub table: Option<U32List>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RigidityArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Coset exponents M, e.g. `0,1,2`.
    #[arg(long)]
    pub cosets: Option<U32List>,
    /// Largest number of maps a search may visit.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Catalog exceptional maps instead of checking one coset union.
    #[arg(long)]
    pub exceptional: bool,
    /// Indices searched with `--exceptional`.
    #[arg(long)]
    pub indices: Option<U32List>,
    /// Largest number of cosets with `--exceptional` or `--margin`.
    #[arg(long)]
    pub r_max: Option<u32>,
    /// Scan primes below the rigidity threshold for exceptional maps.
    #[arg(long)]
    pub margin: bool,
    /// Largest prime scanned with `--margin`.
    #[arg(long)]
    pub p_max: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct TheoremArgs {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct CharsumArgs {
    #[command(subcommand)]
    #[serde(skip)]
    pub action: Option<CharsumAction>,
    #[arg(skip)]
    pub audit: AuditArgs,
}

#[derive(Subcommand, Clone, Debug, PartialEq)]
pub enum CharsumAction {
    /// Evaluate sums and compare them with their bounds.
    Audit(AuditArgs),
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub mode: Option<AuditMode>,
    /// Number of random instances (weil, cor22, cor23).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest prime of the sampled fields.
    #[arg(long)]
    pub max_p: Option<u64>,
    /// Largest degree of the sampled fields.
    #[arg(long)]
    pub max_n: Option<u32>,
    /// Largest order of the sampled fields.
    #[arg(long)]
    pub max_q: Option<u64>,
    /// Root-of-unity audit: the order d (default: every d up to 10).
    #[arg(long)]
    pub d: Option<u32>,
    /// Root-of-unity audit: one exponent set (default: every nonempty M).
    #[arg(long)]
    pub cosets: Option<U32List>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct CliqueArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub cosets: Option<U32List>,
    #[arg(long, value_enum)]
    pub mode: Option<CliqueModeArg>,
    /// Largest base q searched.
    #[arg(long)]
    pub max_q: Option<u32>,
    /// Write the edge list of the graph here.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

/// A fully merged, validated configuration.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: Command,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        command_name(&self.command)
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::FieldInfo(_) => "field-info",
        Command::Directions(_) => "directions",
        Command::Rigidity(_) => "rigidity",
        Command::DirectionsTheorem(_) => "directions-theorem",
        Command::Charsum(_) => "charsum",
        Command::Clique(_) => "clique",
        Command::ExampleF25(_) => "example-f25",
        Command::Run(_) => "run",
    }
}

fn command_from_name(name: &str) -> Result<Command, CliError> {
    Ok(match name {
        "field-info" => Command::FieldInfo(Default::default()),
        "directions" => Command::Directions(Default::default()),
        "rigidity" => Command::Rigidity(Default::default()),
        "directions-theorem" => Command::DirectionsTheorem(Default::default()),
        "charsum" => Command::Charsum(Default::default()),
        "clique" => Command::Clique(Default::default()),
        "example-f25" => Command::ExampleF25(Default::default()),
        other => return Err(CliError::UnknownCommand(other.to_string())),
    })
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| CliError::ConfigSyntax { line: i + 1, text: raw.to_string() })?;
        let key = key.trim().replace('_', "-");
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::InvalidValue {
                key,
                value: value.trim().to_string(),
                reason: "key given twice".into(),
            });
        }
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| CliError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn set<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), CliError>
where
    T::Err: fmt::Display,
{
    if slot.is_none() {
        *slot = Some(parse_value(key, value)?);
    }
    Ok(())
}

fn set_flag(slot: &mut bool, key: &str, value: &str) -> Result<(), CliError> {
    if !*slot {
        *slot = parse_value(key, value)?;
    }
    Ok(())
}

macro_rules! merge_keys {
    ($key:expr, $value:expr; opts: [$($name:literal => $slot:expr),* $(,)?]; flags: [$($fname:literal => $fslot:expr),* $(,)?]) => {
        match $key {
            $($name => set(&mut $slot, $name, $value)?,)*
            $($fname => set_flag(&mut $fslot, $fname, $value)?,)*
            other => return Err(CliError::UnknownKey(other.to_string())),
        }
    };
}

fn merge_key(command: &mut Command, key: &str, value: &str) -> Result<(), CliError> {
    match command {
        Command::FieldInfo(a) => {
            merge_keys!(key, value; opts: ["p" => a.p, "n" => a.n]; flags: ["elements" => a.elements])
        }
        Command::Directions(a) => merge_keys!(key, value;
            opts: ["p" => a.p, "n" => a.n, "coeffs" => a.coeffs, "table" => a.table]; flags: []),
        Command::Rigidity(a) => merge_keys!(key, value;
            opts: ["p" => a.p, "n" => a.n, "d" => a.d, "cosets" => a.cosets, "cap" => a.cap,
                   "indices" => a.indices, "r-max" => a.r_max, "p-max" => a.p_max];
            flags: ["exceptional" => a.exceptional, "margin" => a.margin]),
        Command::DirectionsTheorem(a) => merge_keys!(key, value; opts: ["q" => a.q, "cap" => a.cap]; flags: []),
        Command::Charsum(a) => {
            let a = &mut a.audit;
            merge_keys!(key, value;
                opts: ["mode" => a.mode, "count" => a.count, "seed" => a.seed, "max-p" => a.max_p,
                       "max-n" => a.max_n, "max-q" => a.max_q, "d" => a.d, "cosets" => a.cosets];
                flags: [])
        }
        Command::Clique(a) => merge_keys!(key, value;
            opts: ["p" => a.p, "n" => a.n, "d" => a.d, "cosets" => a.cosets, "mode" => a.mode,
                   "max-q" => a.max_q, "edges" => a.edges];
            flags: []),
        Command::ExampleF25(_) | Command::Run(_) => return Err(CliError::UnknownKey(key.to_string())),
    }
    Ok(())
}

fn check_distinct(key: &str, list: &Option<U32List>) -> Result<(), CliError> {
    if let Some(list) = list {
        let mut seen = list.0.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::InvalidValue {
                key: key.into(),
                value: list.to_string(),
                reason: format!("duplicate entry {}", w[0]),
            });
        }
    }
    Ok(())
}

fn validate(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.jobs == Some(0) {
        return Err(CliError::InvalidValue {
            key: "jobs".into(),
            value: "0".into(),
            reason: "must be at least 1".into(),
        });
    }
    match &config.command {
        Command::Rigidity(a) => {
            check_distinct("cosets", &a.cosets)?;
            check_distinct("indices", &a.indices)
        }
        Command::Clique(a) => check_distinct("cosets", &a.cosets),
        Command::Charsum(a) => check_distinct("cosets", &a.audit.cosets),
        _ => Ok(()),
    }
}

/// Parses arguments (program name first), merges the config file and
/// validates the result.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::from_clap)?;
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    from_parts(cli, file)
}

/// Merges parsed flags with file values (flags first).
pub fn from_parts(cli: Cli, mut file: BTreeMap<String, String>) -> Result<ExperimentConfig, CliError> {
    let mut command = cli.command;
    if let Command::Charsum(a) = &mut command {
        if let Some(CharsumAction::Audit(audit)) = a.action.take() {
            a.audit = audit;
        }
    }
    let named = file.remove("command");
    command = match (command, named) {
        (Command::Run(_), Some(name)) => command_from_name(&name)?,
        (Command::Run(_), None) => {
            return Err(CliError::MissingValue { key: "command".into(), command: "run".into() });
        }
        (cmd, Some(name)) if name != command_name(&cmd) => {
            return Err(CliError::InvalidValue {
                key: "command".into(),
                value: name,
                reason: format!("conflicts with subcommand {}", command_name(&cmd)),
            });
        }
        (cmd, _) => cmd,
    };
    let mut config = ExperimentConfig { command, out: cli.out, csv: cli.csv, jobs: cli.jobs };
    for (key, value) in &file {
        match key.as_str() {
            "out" => set(&mut config.out, key, value)?,
            "csv" => set(&mut config.csv, key, value)?,
            "jobs" => set(&mut config.jobs, key, value)?,
            _ => merge_key(&mut config.command, key, value)?,
        }
    }
    validate(&config)?;
    Ok(config)
}

/// A required option, or `MissingValue`.
pub fn require<T: Clone>(value: &Option<T>, key: &str, command: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::MissingValue { key: key.into(), command: command.into() })
}
