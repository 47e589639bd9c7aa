//! `epf`: ingestion, rolling backtests and evaluation of day-ahead
//! electricity price forecasts.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::DaySpec;
use crate::config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "epf", version, about = "Day-ahead electricity price forecasting")]
struct Cli {
    /// Flat key = value file supplying defaults for any long option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Long,
    Wide,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a raw price CSV, repair clock changes and write the canonical wide CSV.
    Ingest(IngestArgs),
    /// Run the rolling-window backtest and write one forecast CSV per model.
    Backtest(BacktestArgs),
    /// Error measures, m.p.d.f.b., DM matrices and occurrence tables.
    Evaluate(EvaluateArgs),
    /// Diebold-Mariano comparison of two models.
    Dm(DmArgs),
    /// Lasso variable-selection occurrence tables.
    Selection(SelectionArgs),
}

/// Input file options shared by `ingest` and `backtest`.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Price CSV; relative paths missing from the working directory are
    /// looked up under $EPF_DATA_DIR.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Layout of the input file.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Weekday of the first day, 1 = Monday .. 7 = Sunday (default: from the calendar).
    #[arg(long)]
    pub start_weekday: Option<u8>,

    /// Market label stored with the series.
    #[arg(long)]
    pub market: Option<String>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output path of the wide CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Comma-separated model ids, or `all`.
    #[arg(long)]
    pub models: Option<String>,

    /// Calibration window length in days.
    #[arg(long)]
    pub calib: Option<usize>,

    /// First forecast day, as a day index or YYYY-MM-DD (default: first day after a full window).
    #[arg(long)]
    pub first: Option<DaySpec>,

    /// Last forecast day, as a day index or YYYY-MM-DD (default: last day of the series).
    #[arg(long)]
    pub last: Option<DaySpec>,

    /// Forecast only every n-th day (smoke runs).
    #[arg(long)]
    pub stride: Option<usize>,

    /// Use the maximal VAR order instead of AIC selection.
    #[arg(long)]
    pub var_fixed_order: bool,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Test-period slicing shared by the evaluation commands.
#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Keep only days of one season (spring, summer, fall, winter).
    #[arg(long)]
    pub season: Option<String>,

    /// Keep only days on or after this date.
    #[arg(long)]
    pub from: Option<chrono::NaiveDate>,

    /// Keep only days on or before this date.
    #[arg(long)]
    pub to: Option<chrono::NaiveDate>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Backtest output directory, optionally labelled as NAME=DIR; repeat for several datasets.
    #[arg(long)]
    pub forecasts: Vec<String>,

    /// Restrict to these comma-separated model ids.
    #[arg(long)]
    pub models: Option<String>,

    #[command(flatten)]
    pub slice: SliceArgs,

    /// Newey-West lags for the DM variance (0 = sample variance).
    #[arg(long)]
    pub dm_hac_lags: Option<usize>,

    /// Report directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DmArgs {
    /// Backtest output directory.
    #[arg(long)]
    pub forecasts: Option<String>,

    /// Model X of the test; small forward p-values favour X.
    #[arg(long)]
    pub x: String,

    /// Model Y of the test.
    #[arg(long)]
    pub y: String,

    #[command(flatten)]
    pub slice: SliceArgs,

    /// Newey-West lags for the DM variance (0 = sample variance).
    #[arg(long)]
    pub dm_hac_lags: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Backtest output directory.
    #[arg(long)]
    pub forecasts: Option<String>,

    /// Restrict to these comma-separated lasso model ids.
    #[arg(long)]
    pub models: Option<String>,

    #[command(flatten)]
    pub slice: SliceArgs,

    /// Directory for the occurrence tables (default: print a summary only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> error::Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(jobs) = cfg.or(cli.jobs, "jobs")? {
        if jobs == 0 {
            return Err(error::CliError::Usage("--jobs must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    match cli.command {
        Command::Ingest(a) => commands::ingest(&a, &cfg),
        Command::Backtest(a) => commands::backtest(&a, &cfg),
        Command::Evaluate(a) => commands::evaluate(&a, &cfg),
        Command::Dm(a) => commands::dm(&a, &cfg),
        Command::Selection(a) => commands::selection(&a, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
