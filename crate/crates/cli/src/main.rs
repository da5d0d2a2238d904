//! `stable-market`: solve, check, fuzz, reduce and misreport search.
//!
//! Exit codes: 0 success, 1 a check or assertion failed, 2 bad input,
//! 3 internal error.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stable_market::Engine;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Failed(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<stable_market::Error> for CliError {
    fn from(e: stable_market::Error) -> Self {
        match e {
            stable_market::Error::Internal(msg) => CliError::Internal(msg),
            stable_market::Error::Usage(msg) => CliError::Input(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Simple,
    Fast,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Simple => Engine::Simple,
            EngineArg::Fast => Engine::Fast,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Feasible,
    Stable,
    Relaxed,
}

#[derive(Parser)]
#[command(
    name = "stable-market",
    version,
    about = "Bidder-optimal stable outcomes with reserve and maximum prices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a market and print the outcome as JSON.
    Solve {
        /// Instance file, or `-` for stdin.
        path: PathBuf,
        #[arg(long, value_enum, default_value = "simple")]
        engine: EngineArg,
        /// Print the event log to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Check an outcome against a market.
    Check {
        instance: PathBuf,
        outcome: PathBuf,
        #[arg(long, value_enum, default_value = "stable")]
        mode: Mode,
    },
    /// Cross-check the engines (and optionally the oracle) on random markets.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Largest number of bidders; each market draws its size uniformly.
        #[arg(long, default_value_t = 4)]
        bidders: usize,
        /// Largest number of items.
        #[arg(long, default_value_t = 3)]
        items: usize,
        #[arg(long, default_value_t = 6)]
        max_value: i64,
        #[arg(long)]
        with_oracle: bool,
    },
    /// Turn a market with bidder and item scales into a plain one.
    Reduce { path: PathBuf },
    /// Look for a profitable single-valuation lie.
    Misreport {
        path: PathBuf,
        /// 1-based bidder; all bidders in order when omitted.
        #[arg(long)]
        bidder: Option<usize>,
        /// Reported values range over 0..=grid-max.
        #[arg(long, default_value_t = 10)]
        grid_max: i64,
        /// Require zero reserves and distinct per-bidder maxima.
        #[arg(long)]
        restricted: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { path, engine, trace } => commands::solve(&path, engine.into(), trace),
        Command::Check {
            instance,
            outcome,
            mode,
        } => commands::check(&instance, &outcome, mode),
        Command::Fuzz {
            seed,
            count,
            bidders,
            items,
            max_value,
            with_oracle,
        } => commands::fuzz(seed, count, bidders, items, max_value, with_oracle),
        Command::Reduce { path } => commands::reduce(&path),
        Command::Misreport {
            path,
            bidder,
            grid_max,
            restricted,
        } => commands::misreport(&path, bidder, grid_max, restricted),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
