//! `probit-ar`: simulate, fit, replicate, bootstrap and prepare panels of
//! multivariate binary time series.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "probit-ar", version, about = "Multivariate autoregressive probit models")]
struct Cli {
    /// TOML or JSON file with option values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PROBIT_AR_THREADS")]
    threads: Option<usize>,
    /// Exit with status 3 when a statistical warning is raised.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a panel and write it with its true parameters.
    Simulate(commands::SimulateArgs),
    /// Fit a panel by the two-step or one-step method.
    Estimate(commands::EstimateArgs),
    /// Monte-Carlo study: simulate and refit many panels.
    Replicate(commands::ReplicateArgs),
    /// Parametric bootstrap intervals around a fit.
    Bootstrap(commands::BootstrapArgs),
    /// Binarize, impute and select series of a raw long-format panel.
    Prep(commands::PrepArgs),
}

const COMMANDS: [&str; 5] = ["simulate", "estimate", "replicate", "bootstrap", "prep"];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    /// Outputs were written but warnings were raised under `--strict`.
    Strict(Vec<String>),
}

impl From<probit_ar::Error> for CliError {
    fn from(e: probit_ar::Error) -> Self {
        match e {
            probit_ar::Error::Numerical(_) | probit_ar::Error::TooManyFailures { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Long flag names of a subcommand, the keys its config section accepts.
fn known_keys(name: &str) -> Vec<String> {
    Cli::command()
        .find_subcommand(name)
        .map(|c| c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect())
        .unwrap_or_default()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };
    file.check_sections(&COMMANDS)?;
    let threads = cli.threads.or(file.global_threads()?);
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let strict = cli.strict || file.global_strict()?;
    let warnings = match &cli.command {
        Command::Simulate(a) => commands::simulate(file.merge("simulate", &known_keys("simulate"), a)?)?,
        Command::Estimate(a) => commands::estimate(file.merge("estimate", &known_keys("estimate"), a)?)?,
        Command::Replicate(a) => commands::replicate(file.merge("replicate", &known_keys("replicate"), a)?)?,
        Command::Bootstrap(a) => commands::bootstrap(file.merge("bootstrap", &known_keys("bootstrap"), a)?)?,
        Command::Prep(a) => commands::prep(file.merge("prep", &known_keys("prep"), a)?)?,
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if strict && !warnings.is_empty() {
        return Err(CliError::Strict(warnings));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Strict(w)) => {
            eprintln!("error: {} warning(s) raised under --strict", w.len());
            ExitCode::from(3)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
