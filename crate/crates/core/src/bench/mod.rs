//! Benchmark harness: random instances, screening detection rates, fixed
//! budget solver comparisons and performance profiles.

mod budget;
mod detection;
mod generate;
mod profile;
mod tables;

use serde::{Deserialize, Serialize};

pub use budget::{budget_benchmark, calibrate_budget, run_budget_trial, BenchRow, BENCH_GAP_FLOOR, CALIBRATION_TARGET_GAP};
pub use detection::{detection_experiment, detection_trial, DetectionResult, DetectionRow, TrialDetection};
pub use generate::{
    default_toeplitz_width, gen_dictionary, gen_dictionary_with_width, gen_observation, oscar_weights, splitmix64, trial_seed, DictKind,
    OSCAR_W_LAST,
};
pub use profile::{default_delta_grid, performance_profile, ProfileRow};
pub use tables::{
    read_bench_csv, read_detection_csv, read_profile_csv, write_bench_csv, write_detection_csv, write_profile_csv, BENCH_HEADER,
    DETECTION_HEADER, PROFILE_HEADER,
};

use crate::dual::ScalingVariant;
use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::solver::{ScreenStrategy, SolveOptions};

/// Solver configurations compared by the budget benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    /// No screening.
    #[serde(rename = "PG-no")]
    PgNo,
    /// Screening with `r_q = q`.
    #[serde(rename = "PG-r=q")]
    PgRq,
    /// Screening with `r_q = q` on a dual point scaled by the weight-wise maximum.
    #[serde(rename = "PG-Bao")]
    PgBao,
    /// Screening with every `r_q` through the fast joint test.
    #[serde(rename = "PG-all")]
    PgAll,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::PgNo, SolverKind::PgRq, SolverKind::PgBao, SolverKind::PgAll];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::PgNo => "PG-no",
            SolverKind::PgRq => "PG-r=q",
            SolverKind::PgBao => "PG-Bao",
            SolverKind::PgAll => "PG-all",
        }
    }

    pub fn screen_strategy(self) -> ScreenStrategy {
        match self {
            SolverKind::PgNo => ScreenStrategy::None,
            SolverKind::PgRq | SolverKind::PgBao => ScreenStrategy::Rq,
            SolverKind::PgAll => ScreenStrategy::All,
        }
    }

    pub fn scaling_variant(self) -> ScalingVariant {
        match self {
            SolverKind::PgBao => ScalingVariant::Max,
            _ => ScalingVariant::Full,
        }
    }

    /// Solver options for this configuration on top of `base`.
    pub fn options(self, base: &SolveOptions) -> SolveOptions {
        SolveOptions {
            screen_strategy: self.screen_strategy(),
            scaling_variant: self.scaling_variant(),
            ..base.clone()
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {s:?}")))
    }
}

/// `{0} ∪ {10^-6, 10^-5.75, …, 1}`.
pub fn default_r0_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..=24).map(|k| 10f64.powf(-6.0 + k as f64 / 4.0)))
        .collect()
}

/// Parameters shared by the detection and budget experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dict_kind: DictKind,
    pub m: usize,
    pub n: usize,
    /// Smallest OSCAR weight; the largest is 1.
    pub oscar_w_last: f64,
    /// `λ / λ_max`.
    pub lambda_ratio: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub r0_grid: Vec<f64>,
    /// Per-solve budget in seconds; calibrated when absent.
    pub time_budget_s: Option<f64>,
    pub solvers: Vec<SolverKind>,
    /// Toeplitz bump width; `m / 20` when absent.
    pub toeplitz_width: Option<f64>,
    /// Duality gap required of the reference solutions.
    pub reference_gap: f64,
    /// Magnitude below which a reference coefficient counts as zero.
    pub zero_threshold: f64,
    pub screen_every: usize,
    /// Leading trials timed to calibrate the budget; every trial when
    /// absent.
    pub calibration_trials: Option<usize>,
    /// Budgeted runs per solver and trial; the one with the smallest final
    /// gap is kept.
    pub budget_repeats: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dict_kind: DictKind::Gaussian,
            m: 100,
            n: 300,
            oscar_w_last: 0.1,
            lambda_ratio: 0.5,
            trials: 50,
            master_seed: 0,
            r0_grid: default_r0_grid(),
            time_budget_s: None,
            solvers: SolverKind::ALL.to_vec(),
            toeplitz_width: None,
            reference_gap: 1e-14,
            zero_threshold: 1e-9,
            screen_every: 20,
            calibration_trials: None,
            budget_repeats: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m == 0 || self.n < 2 {
            return bad(format!("need m >= 1 and n >= 2, got m = {}, n = {}", self.m, self.n));
        }
        if !(self.oscar_w_last > 0.0 && self.oscar_w_last <= 1.0) {
            return bad(format!("oscar_w_last must lie in (0, 1], got {}", self.oscar_w_last));
        }
        if !(self.lambda_ratio > 0.0 && self.lambda_ratio <= 1.0) {
            return bad(format!("lambda_ratio must lie in (0, 1], got {}", self.lambda_ratio));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.r0_grid.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return bad("r0_grid entries must be finite and nonnegative".into());
        }
        if let Some(t) = self.time_budget_s {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("time_budget_s must be positive, got {t}"));
            }
        }
        if let Some(s) = self.toeplitz_width {
            if !(s > 0.0) {
                return bad(format!("toeplitz_width must be positive, got {s}"));
            }
        }
        if !(self.reference_gap > 0.0) {
            return bad("reference_gap must be positive".into());
        }
        if !(self.zero_threshold >= 0.0) {
            return bad("zero_threshold must be nonnegative".into());
        }
        if self.screen_every == 0 {
            return bad("screen_every must be positive".into());
        }
        if self.budget_repeats == 0 {
            return bad("budget_repeats must be positive".into());
        }
        if self.calibration_trials == Some(0) {
            return bad("calibration_trials must be positive".into());
        }
        Ok(())
    }

    pub fn toeplitz_width(&self) -> f64 {
        self.toeplitz_width.unwrap_or_else(|| default_toeplitz_width(self.m))
    }

    /// Instance drawn from an explicit seed.
    pub fn instance_from_seed(&self, seed: u64) -> Result<ProblemInstance> {
        let dict = gen_dictionary_with_width(self.dict_kind, self.m, self.n, seed, self.toeplitz_width())?;
        let y = gen_observation(self.m, seed)?;
        let w = oscar_weights(self.n, self.oscar_w_last)?;
        ProblemInstance::with_lambda_ratio(dict, y, self.lambda_ratio, w)
    }

    /// Instance of trial `trial`.
    pub fn instance(&self, trial: usize) -> Result<ProblemInstance> {
        self.instance_from_seed(trial_seed(self.master_seed, trial as u64))
    }
}

/// Runs `f` over `0..count` on `jobs` worker threads, preserving order.
pub(crate) fn run_parallel<T, F>(count: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    if jobs <= 1 {
        return (0..count).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}
