//! `eigu`: command-line front end for ingestion, feature extraction,
//! cross-validation, benchmarking, statistics and parameter sweeps.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid input or usage.

mod commands;
mod runinfo;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "eigu",
    version,
    about = "Universum GEPSVM classifiers for EEG seizure detection"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Root holding the Z, O, N, F, S set directories [default: $EIGU_DATA_ROOT]
    #[arg(long, global = true)]
    pub data_root: Option<PathBuf>,
    /// Directory for outputs not given an explicit path
    #[arg(long, global = true, default_value = "eigu-out")]
    pub output_dir: PathBuf,
    /// Seed for shuffles, folds and ICA [default: 0; bench: the manifest's]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: 1; bench: the manifest's]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load Bonn recordings and write a task bundle of raw signals
    Ingest(commands::IngestArgs),
    /// Turn a raw-signal bundle into a feature bundle (PCA/ICA are fit on all labeled rows; `bench` fits per fold)
    Features(commands::FeaturesArgs),
    /// Cross-validate one classifier configuration on a bundle
    Cv(commands::CvArgs),
    /// Run a benchmark manifest
    Bench(commands::BenchArgs),
    /// Friedman, Wilcoxon and win-tie-loss comparison of an accuracy table
    Stats(commands::StatsArgs),
    /// Accuracy over a (γ, ψ) decade grid
    Sweep(commands::SweepArgs),
    /// Check the eigen solvers on known problems
    #[command(hide = true)]
    EigSelftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
