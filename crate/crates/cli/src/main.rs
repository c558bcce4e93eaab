//! `slope-screen`: generate instances, solve, screen and run the experiments.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slope_screen::bench::DictKind;
use slope_screen::{ScalingVariant, ScreenStrategy, Strategy};

#[derive(Debug, Parser)]
#[command(name = "slope-screen", version, about = "SLOPE solver with safe screening")]
pub struct Cli {
    /// Master seed for every random draw; 0 unless a config file sets one.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Log one line per screening round to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random dictionary and observation.
    Gen(GenArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run one screening test at a given iterate.
    Screen(ScreenArgs),
    /// Detection experiment: share of zeros certified per sphere size.
    Detect(DetectArgs),
    /// Fixed-budget benchmark of the solver configurations.
    Bench(BenchArgs),
    /// Performance profiles from a benchmark table.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "gaussian", value_parser = parse_kind)]
    pub kind: DictKind,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    /// Toeplitz bump width; `m / 20` by default.
    #[arg(long)]
    pub toeplitz_width: Option<f64>,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub obs: PathBuf,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub obs: PathBuf,
    /// `λ / λ_max`.
    #[arg(long, default_value_t = 0.5)]
    pub lambda_ratio: f64,
    /// Absolute λ; overrides `--lambda-ratio`.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Smallest OSCAR weight; 0.1 unless a weights file is given.
    #[arg(long, conflicts_with = "weights_file")]
    pub oscar_wlast: Option<f64>,
    /// Nonincreasing weights, one per column.
    #[arg(long)]
    pub weights_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long, default_value = "none", value_parser = parse_screen_strategy)]
    pub screen: ScreenStrategy,
    #[arg(long, default_value_t = 20)]
    pub screen_every: usize,
    #[arg(long, default_value = "full", value_parser = parse_scaling)]
    pub scaling: ScalingVariant,
    /// Reset the momentum after every reduction.
    #[arg(long)]
    pub restart_on_reduction: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Primal iterate as a vector file.
    #[arg(long, conflicts_with = "result", required_unless_present = "result")]
    pub x: Option<PathBuf>,
    /// Result file written by `solve`; its `x` is used as the iterate.
    #[arg(long)]
    pub result: Option<PathBuf>,
    #[arg(long, default_value = "all", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Extra sphere radius added to the GAP radius.
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    #[arg(long, default_value = "full", value_parser = parse_scaling)]
    pub scaling: ScalingVariant,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment configuration; the flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<DictKind>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub oscar_wlast: Option<f64>,
    #[arg(long)]
    pub lambda_ratio: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Worker threads, capped by SLOPE_SCREEN_THREADS.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Per-solve budget in seconds; calibrated on this machine when absent.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Accepted for symmetry with `detect` and ignored: timed runs are serial.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the performance profile of the table.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Gap levels; 49 log-spaced levels from 1e-14 to 1e-2 by default.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
}

fn parse_kind(s: &str) -> Result<DictKind, String> {
    s.parse().map_err(|e: slope_screen::Error| e.to_string())
}

fn parse_screen_strategy(s: &str) -> Result<ScreenStrategy, String> {
    s.parse().map_err(|e: slope_screen::Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: slope_screen::Error| e.to_string())
}

fn parse_scaling(s: &str) -> Result<ScalingVariant, String> {
    match s {
        "full" => Ok(ScalingVariant::Full),
        "max" => Ok(ScalingVariant::Max),
        other => Err(format!("unknown scaling {other:?}, expected full or max")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_guard() { 3 } else { 2 })
        }
    }
}
