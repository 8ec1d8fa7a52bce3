use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use koopman_rul::harness::{self, ExperimentConfig};
use koopman_rul::Result;
use serde::Serialize;

/// Simulate battery fleets, train Koopman models and estimate remaining useful life.
#[derive(Parser)]
#[command(name = "koopman-rul", version)]
struct Cli {
    /// Experiment config (JSON); defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// First model seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of model seeds to aggregate over.
    #[arg(long, global = true)]
    seeds: Option<usize>,
    /// Write hidden health columns into simulated CSVs.
    #[arg(long, global = true)]
    include_hidden: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured fleet and write CSVs, manifest and split.
    Simulate,
    /// Train one model with the first seed.
    Train,
    /// Evaluate RUL over all seeds and write reports and predictions.
    Evaluate,
    /// Run one of the studies.
    Study {
        #[arg(value_enum)]
        kind: Study,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Study {
    Noise,
    Early,
    Extrapolate,
    Spectrum,
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(seeds) = cli.seeds {
        cfg.seeds = seeds;
    }
    cfg.include_hidden |= cli.include_hidden;
    match cli.command {
        Command::Simulate => print(&harness::simulate(&cfg)?),
        Command::Train => print(&harness::train(&cfg)?),
        Command::Evaluate => print(&harness::evaluate(&cfg)?),
        Command::Study { kind } => match kind {
            Study::Noise => print(&harness::study_noise(&cfg)?.summary),
            Study::Early => print(&harness::study_early(&cfg)?.summary),
            Study::Extrapolate => print(&harness::study_extrapolate(&cfg)?.summary),
            Study::Spectrum => print(&harness::study_spectrum(&cfg)?),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
