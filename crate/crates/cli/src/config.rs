use clap::{Parser, Subcommand};
use serde::Serialize;

use stratkit_core::homological::DEFAULT_BOUND;
use stratkit_core::rewriting::DEFAULT_DEGREE_BOUND;

#[derive(Parser, Debug)]
#[command(name = "stratkit", version, about = "Stratification data and Ext/Tor certificates for quiver algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Degree bound N for Ext/Tor tables (for `basis`: the rewriting degree bound).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound: Option<u64>,
    /// Comma-separated vertices; the set is closed downwards.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub segment: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub json: bool,
    /// Override a PARAM line, e.g. `--param z=1`.
    #[arg(long = "param", global = true, value_parser = parse_param)]
    pub params: Vec<(String, String)>,
    /// Maximal monomial degree examined by the rewriting completion.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub degree_bound: Option<u64>,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let (name, value) = (name.trim(), value.trim());
    if name.is_empty() || value.is_empty() {
        return Err(format!("expected name=value, got `{s}`"));
    }
    Ok((name.to_owned(), value.to_owned()))
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Normal-form basis and dimension.
    Basis { file: String },
    /// Dimensions of the Peirce blocks e_x A e_y.
    Peirce { file: String },
    /// Radical and simple modules.
    Simples { file: String },
    /// Well-definedness of standard modules and standard filtrations.
    Check { file: String },
    /// Heredity chain of idempotent ideals.
    Chain { file: String },
    /// Ext dimensions between two named modules.
    Ext {
        file: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Full-embedding certificate for one or all initial segments.
    Certify { file: String },
    /// The whole pipeline: basis, simples, check, chain, certify.
    Report { file: String },
}

impl Command {
    pub fn file(&self) -> &str {
        match self {
            Command::Basis { file }
            | Command::Peirce { file }
            | Command::Simples { file }
            | Command::Check { file }
            | Command::Chain { file }
            | Command::Ext { file, .. }
            | Command::Certify { file }
            | Command::Report { file } => file,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis { .. } => "basis",
            Command::Peirce { .. } => "peirce",
            Command::Simples { .. } => "simples",
            Command::Check { .. } => "check",
            Command::Chain { .. } => "chain",
            Command::Ext { .. } => "ext",
            Command::Certify { .. } => "certify",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

/// Everything that determines a run; embedded in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub input: String,
    pub command: Command,
    /// Ext/Tor degree bound N.
    pub bound: usize,
    pub degree_bound: usize,
    /// Requested vertices before down-closure; `None` means all segments.
    pub segment: Option<Vec<String>>,
    pub format: OutputFormat,
    pub params: Vec<(String, String)>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> RunConfig {
        let is_basis = matches!(cli.command, Command::Basis { .. });
        let degree_bound = match (cli.degree_bound, cli.bound) {
            (Some(d), _) => d as usize,
            (None, Some(b)) if is_basis => b as usize,
            _ => DEFAULT_DEGREE_BOUND,
        };
        RunConfig {
            input: cli.command.file().to_owned(),
            bound: cli.bound.map_or(DEFAULT_BOUND, |b| b as usize),
            degree_bound,
            segment: cli
                .segment
                .map(|s| s.into_iter().map(|v| v.trim().to_owned()).filter(|v| !v.is_empty()).collect()),
            format: if cli.json { OutputFormat::Json } else { OutputFormat::Text },
            params: cli.params,
            command: cli.command,
        }
    }
}
