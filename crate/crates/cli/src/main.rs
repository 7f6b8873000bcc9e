//! Command-line pipeline: ingest tick data, aggregate bars, estimate tail
//! exponents and their ratio, analyze price impact, fit q-Gaussians, and
//! generate synthetic markets. Every run is deterministic given its flags
//! and seed and leaves a `manifest.json` describing inputs and outputs.

mod manifest;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use retvol::bars::AggregationScheme;

#[derive(Parser)]
#[command(name = "retvol", version, about = "Tail statistics of high-frequency returns and volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate tick CSVs; write canonical copies and reports.
    Ingest(IngestArgs),
    /// Aggregate into return/volume bars under one interval scheme.
    Bars(BarsArgs),
    /// Per-symbol CCDFs, local slopes, and the exponent table.
    Tails(TailsArgs),
    /// Exponent table plus the cross-symbol ratio summary.
    Ratio(TailsArgs),
    /// Price-impact curve, linear-law fit, conditional tails, surrogates.
    Impact(ImpactArgs),
    /// q-Gaussian fits to volume (or return) distributions.
    Qfit(QfitArgs),
    /// Generate a synthetic market tape.
    Synth(SynthArgs),
    /// Full pipeline over scheme presets, bundled with a manifest.
    Report(ReportArgs),
}

#[derive(Args, Clone, Serialize)]
struct InputArgs {
    /// Tick CSV files, one per symbol (symbol = file stem).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Session calendar JSON applied to every symbol.
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Drop trades printed exactly at a session open (needs --calendar).
    #[arg(long, requires = "calendar")]
    exclude_opening_auction: bool,
}

#[derive(Args, Clone, Serialize)]
struct OutArg {
    /// Output directory, created if missing. Not part of the recorded
    /// parameters: runs differing only in destination are the same run.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Clone, Serialize)]
struct SchemeArg {
    /// Clock-time window length in minutes.
    #[arg(long, conflicts_with = "n_trades")]
    dt_min: Option<f64>,
    /// Trades per block (1 = tick by tick).
    #[arg(long)]
    n_trades: Option<usize>,
}

impl SchemeArg {
    fn scheme(&self) -> AggregationScheme {
        match (self.dt_min, self.n_trades) {
            (_, Some(n_t)) => AggregationScheme::TradeCount { n_t },
            (Some(delta_t_min), None) => AggregationScheme::ClockTime { delta_t_min },
            (None, None) => AggregationScheme::ClockTime { delta_t_min: 1.0 },
        }
    }
}

#[derive(Args, Clone, Serialize)]
struct EstimatorArgs {
    /// Fraction of CCDF points used by the least-squares tail fit.
    #[arg(long, default_value_t = 0.01)]
    tail_fraction: f64,
    /// Hill order statistics count; 0 picks max(100, n/100).
    #[arg(long, default_value_t = 0)]
    hill_k: usize,
    /// Log-spaced bins for the local-slope curves.
    #[arg(long, default_value_t = 25)]
    slope_bins: usize,
    /// Bins per local-slope regression window.
    #[arg(long, default_value_t = 5)]
    slope_window: usize,
}

#[derive(Args, Clone, Serialize)]
struct PoolArg {
    /// Pool standardized observations across symbols before building CCDFs
    /// (the default when several inputs are given).
    #[arg(long, overrides_with = "per_symbol")]
    pool: bool,
    /// Keep symbols separate instead of pooling.
    #[arg(long)]
    per_symbol: bool,
}

impl PoolArg {
    fn pooled(&self) -> bool {
        !self.per_symbol
    }
}

#[derive(Args, Clone, Serialize)]
struct ImpactParams {
    /// Log-spaced volume bins for E(r^2|V).
    #[arg(long, default_value_t = 30)]
    bins: usize,
    /// Linear-law fit threshold in normalized volume units.
    #[arg(long, default_value_t = 4.0)]
    v_min: f64,
    /// Volume band edges for the conditional return tails.
    #[arg(long, value_delimiter = ',', default_values_t = [100.0, 1000.0])]
    breakpoints: Vec<f64>,
    /// Interpret --breakpoints in normalized volume units instead of raw shares.
    #[arg(long)]
    normalized_breakpoints: bool,
    /// Surrogate impact exponents to compare.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7])]
    beta: Vec<f64>,
}

#[derive(Args, Clone, Serialize)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Clone, Serialize)]
struct BarsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scheme: SchemeArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Clone, Serialize)]
struct TailsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scheme: SchemeArg,
    #[command(flatten)]
    estimators: EstimatorArgs,
    #[command(flatten)]
    pool: PoolArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Clone, Serialize)]
struct ImpactArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scheme: SchemeArg,
    #[command(flatten)]
    estimators: EstimatorArgs,
    #[command(flatten)]
    params: ImpactParams,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum QfitTarget {
    Volumes,
    Returns,
}

#[derive(Args, Clone, Serialize)]
struct QfitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scheme: SchemeArg,
    /// Which aggregated series to fit.
    #[arg(long, value_enum, default_value = "volumes")]
    target: QfitTarget,
    /// Pin mu_q = 0 (always on for --target returns).
    #[arg(long)]
    pin_mu: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Clone, Serialize)]
struct SynthArgs {
    /// Symbol name for the generated tape.
    #[arg(long, default_value = "SYNTH")]
    symbol: String,
    /// Number of trades.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Volume law: pareto or qgauss.
    #[arg(long, default_value = "pareto")]
    law: String,
    /// Pareto tail exponent.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Pareto scale (minimum volume).
    #[arg(long, default_value_t = 100.0)]
    x_min: f64,
    /// q-Gaussian shape for --law qgauss.
    #[arg(long, default_value_t = 1.5)]
    q: f64,
    /// q-Gaussian width for --law qgauss.
    #[arg(long, default_value_t = 50.0)]
    sigma: f64,
    /// Impact exponent of the generated price path.
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Std of the multiplicative lognormal impact noise (0 = exact).
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 100.0)]
    base_price: f64,
    /// Inter-trade spacing in milliseconds.
    #[arg(long, default_value_t = 1000)]
    dt_ms: i64,
    /// Sample std of the per-trade return magnitudes.
    #[arg(long, default_value_t = 1e-3)]
    return_scale: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Clone, Serialize)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Clock-time presets in minutes.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 15.0, 120.0])]
    dt_min: Vec<f64>,
    /// Trade-count presets.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 15, 30])]
    n_trades: Vec<usize>,
    #[command(flatten)]
    estimators: EstimatorArgs,
    #[command(flatten)]
    impact: ImpactParams,
    #[command(flatten)]
    pool: PoolArg,
    #[command(flatten)]
    out: OutArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<()> = match cli.command {
        Command::Ingest(args) => pipeline::ingest(&args),
        Command::Bars(args) => pipeline::bars(&args),
        Command::Tails(args) => pipeline::tails(&args, false),
        Command::Ratio(args) => pipeline::tails(&args, true),
        Command::Impact(args) => pipeline::impact(&args),
        Command::Qfit(args) => pipeline::qfit(&args),
        Command::Synth(args) => pipeline::synth(&args),
        Command::Report(args) => pipeline::report(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
