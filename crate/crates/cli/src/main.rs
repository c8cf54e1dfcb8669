//! `transprec`: run kernels, tune precision, collect stats and estimate cost.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "transprec", version, about = "Transprecision tuning and cost flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a kernel and print its output, one value per line.
    Run(RunArgs),
    /// Find minimal per-variable precision under a quality threshold.
    Tune(TuneArgs),
    /// Count operations, casts and memory accesses of a kernel run.
    Stats(StatsArgs),
    /// Estimate cycles, memory accesses and energy from stats.
    Cost(CostArgs),
}

#[derive(Args, Clone)]
pub struct InputArgs {
    /// JACOBI, KNN, PCA, DWT, SVM or CONV.
    #[arg(long)]
    pub kernel: String,
    /// Input generator seed. Repeatable for `tune`.
    #[arg(long, default_value = "42")]
    pub seed: Vec<u64>,
    /// Problem size (grid side, sample count or signal length).
    #[arg(long)]
    pub size: Option<usize>,
    /// Iteration count for JACOBI and PCA.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Read inputs from files instead of generating them. Repeatable for `tune`.
    #[arg(long, conflicts_with_all = ["size", "iterations"])]
    pub input: Vec<PathBuf>,
    /// Write the generated input to a file.
    #[arg(long)]
    pub write_input: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct FormatArgs {
    /// v1, v2 or custom:<map file>.
    #[arg(long, default_value = "v2")]
    pub type_system: String,
    /// Precision bits per variable group, one per line. Default: all binary32.
    #[arg(long)]
    pub precision_file: Option<PathBuf>,
    /// Use the named storage type of each precision instead of the exact format.
    #[arg(long)]
    pub storage: bool,
}

#[derive(Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub formats: FormatArgs,
    /// Write the stats report of this run.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// v1, v2 or custom:<map file>.
    #[arg(long, default_value = "v2")]
    pub type_system: String,
    /// Largest accepted noise-to-signal power ratio.
    #[arg(long)]
    pub threshold: f64,
    /// Where to write the tuned precision file.
    #[arg(long)]
    pub precision_file: PathBuf,
    /// Write the tuning report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub formats: FormatArgs,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct CostArgs {
    /// Stats report to cost. Without it, `--kernel` is run with storage types.
    #[arg(long, required_unless_present = "kernel")]
    pub stats: Option<PathBuf>,
    /// Run this kernel instead of reading `--stats`.
    #[arg(long, conflicts_with = "stats")]
    pub kernel: Option<String>,
    #[arg(long, default_value = "42")]
    pub seed: u64,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, default_value = "v2")]
    pub type_system: String,
    #[arg(long)]
    pub precision_file: Option<PathBuf>,
    /// Latency and energy tables. Default: built-in unit tables.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Stats or cost report to normalize against. With `--kernel` the
    /// default is the all-binary32 run.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Tune(a) => commands::tune(a),
        Command::Stats(a) => commands::stats(a),
        Command::Cost(a) => commands::cost(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
