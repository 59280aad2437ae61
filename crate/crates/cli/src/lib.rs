//! Command-line driver for trend-based hedging backtests: synthetic data,
//! trend estimation, hedge runs and jump analysis, written as CSV and SVG.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 usage error.

pub mod commands;
pub mod config;
pub mod plot;
pub mod table;

use clap::{Parser, Subcommand};

use commands::GenerateArgs;
use config::RunArgs;

#[derive(Debug, Parser)]
#[command(
    name = "trendhedge",
    version,
    about = "Trend-based delta hedging backtests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic GBM price series (and optionally an option on it).
    Generate(GenerateArgs),
    /// Write causal trend, derivative and residual of the inputs.
    Trend(RunArgs),
    /// Run the risk-free tracking hedge and write Δ, targets and a report.
    Hedge(RunArgs),
    /// Forecast jumps on the underlying and write the shaped hedge.
    Jumps(RunArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => commands::generate(&args),
        Command::Trend(args) => Ok(commands::trend(&args.resolve()?)?),
        Command::Hedge(args) => Ok(commands::hedge(&with_option(&args)?)?),
        Command::Jumps(args) => Ok(commands::jumps(&with_option(&args)?)?),
    }
}

fn with_option(args: &RunArgs) -> Result<config::RunConfig, CliError> {
    let run = args.resolve()?;
    if run.option.is_none() {
        return Err(CliError::Usage("missing --option".to_string()));
    }
    Ok(run)
}
