//! Command-line front end for overlapping-generations equilibrium paths:
//! simulate configured scenarios, sweep grids of indeterminate initial
//! prices, and re-verify stored trajectories.
//!
//! Exit codes: 0 verified/complete, 1 configuration or input error,
//! 2 non-equilibrium, 3 inconclusive transversality tail.

mod config;
mod report;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use run::{CliError, Outcome};

#[derive(Parser)]
#[command(
    name = "olg",
    version,
    about = "Simulate, classify, and verify overlapping-generations equilibrium paths"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run one configured scenario; emits trajectory.csv and report.txt.
    Simulate(CommonArgs),
    /// Classify a grid of initial asset prices; emits sweep.csv.
    Sweep(SweepArgs),
    /// Re-verify a stored trajectory.csv; emits report.txt.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (flat key=value with [sections]).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `dir` from the config's [output] section.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured horizon.
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Worker threads for grid evaluation (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,
}

fn load(common: &CommonArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let text = std::fs::read_to_string(&common.config)?;
    let config = RunConfig::parse(&text)?;
    let out = common
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, out))
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.verb {
        Verb::Simulate(common) => {
            let (config, out) = load(&common)?;
            run::run_simulate(&config, &out, common.horizon)
        }
        Verb::Sweep(args) => {
            let (config, out) = load(&args.common)?;
            run::run_sweep(&config, &out, args.common.horizon, args.jobs)
        }
        Verb::Verify(common) => {
            let (config, out) = load(&common)?;
            run::run_verify(&config, &out, common.horizon)
        }
    }
}

fn main() {
    match dispatch(Cli::parse()) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            std::process::exit(outcome.exit_code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
