use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, SolverKind};
use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::solver::{estimate_lipschitz, solve_with_screening, ExitReason, SolveOptions};

/// Gap at which a budgeted solve may stop early; below every profile level.
pub const BENCH_GAP_FLOOR: f64 = 1e-15;
/// Gap the calibrated budget lets the screening solver reach on about half
/// of the pilot instances.
pub const CALIBRATION_TARGET_GAP: f64 = 1e-8;
const CALIBRATION_MAX_S: f64 = 600.0;

/// One line of the budget benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub trial: usize,
    pub solver: SolverKind,
    pub final_gap: f64,
    pub wall_time_s: f64,
}

fn budget_options(cfg: &ExperimentConfig, budget_s: f64) -> SolveOptions {
    SolveOptions {
        gap_tol: BENCH_GAP_FLOOR,
        max_iters: usize::MAX,
        time_budget: Some(budget_s),
        screen_every: cfg.screen_every,
        record_trace: false,
        ..SolveOptions::default()
    }
}

/// Step constant shared by every solver on `p`, computed outside the timed
/// region.
fn shared_lipschitz(p: &ProblemInstance) -> Option<f64> {
    Some(estimate_lipschitz(p.dict()).value).filter(|l| *l > 0.0)
}

/// Runs every configured solver on one instance under the same budget and
/// keeps each solver's best repeat: interference from the machine only ever
/// costs iterations. Repeats cycle through the solvers so that slow drifts
/// hit all of them alike.
pub fn run_budget_trial(cfg: &ExperimentConfig, trial: usize, p: &ProblemInstance, budget_s: f64) -> Result<Vec<BenchRow>> {
    let base = SolveOptions {
        lipschitz: shared_lipschitz(p),
        ..budget_options(cfg, budget_s)
    };
    let opts: Vec<SolveOptions> = cfg.solvers.iter().map(|s| s.options(&base)).collect();
    let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(cfg.budget_repeats); opts.len()];
    for _ in 0..cfg.budget_repeats {
        for (o, out) in opts.iter().zip(runs.iter_mut()) {
            let res = solve_with_screening(p, o)?;
            out.push((res.gap, res.wall_time_s));
        }
    }
    Ok(cfg
        .solvers
        .iter()
        .zip(runs)
        .map(|(&solver, mut r)| {
            r.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (final_gap, wall_time_s) = r[0];
            BenchRow {
                trial,
                solver,
                final_gap,
                wall_time_s,
            }
        })
        .collect())
}

/// Median time PG-all needs to reach [`CALIBRATION_TARGET_GAP`] on the
/// leading trials, so that it gets there on about half of them.
pub fn calibrate_budget(cfg: &ExperimentConfig) -> Result<f64> {
    cfg.validate()?;
    let count = cfg.calibration_trials.unwrap_or(cfg.trials).min(cfg.trials);
    let opts = SolverKind::PgAll.options(&SolveOptions {
        gap_tol: CALIBRATION_TARGET_GAP,
        max_iters: usize::MAX,
        time_budget: Some(CALIBRATION_MAX_S),
        screen_every: cfg.screen_every,
        record_trace: false,
        ..SolveOptions::default()
    });
    let mut times = Vec::with_capacity(count);
    for trial in 0..count {
        let p = cfg.instance(trial)?;
        let opts = SolveOptions {
            lipschitz: shared_lipschitz(&p),
            ..opts.clone()
        };
        if trial == 0 {
            // warm caches and the allocator before timing
            solve_with_screening(&p, &opts)?;
        }
        let res = solve_with_screening(&p, &opts)?;
        if res.exit != ExitReason::Tolerance {
            return Err(Error::InvalidArgument(format!(
                "budget calibration: trial {trial} did not reach gap {CALIBRATION_TARGET_GAP:e} within {CALIBRATION_MAX_S} s"
            )));
        }
        times.push(res.wall_time_s);
    }
    times.sort_by(|a, b| a.total_cmp(b));
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    };
    Ok(median.max(1e-6))
}

/// Fixed-budget comparison of the configured solvers, run serially so that
/// timings are not perturbed by concurrent work.
pub fn budget_benchmark(cfg: &ExperimentConfig, budget_s: f64) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    if !(budget_s > 0.0 && budget_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("time budget must be positive, got {budget_s}")));
    }
    let mut rows = Vec::with_capacity(cfg.trials * cfg.solvers.len());
    for trial in 0..cfg.trials {
        let p = cfg.instance(trial)?;
        rows.extend(run_budget_trial(cfg, trial, &p, budget_s)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_per_solver() {
        let cfg = ExperimentConfig {
            m: 20,
            n: 40,
            trials: 2,
            calibration_trials: Some(3),
            ..Default::default()
        };
        let budget = calibrate_budget(&cfg).unwrap();
        assert!(budget > 0.0);
        let rows = budget_benchmark(&cfg, budget).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].solver, SolverKind::PgNo);
        assert!(rows.iter().all(|r| r.final_gap >= 0.0 && r.wall_time_s > 0.0));
        assert!(budget_benchmark(&cfg, 0.0).is_err());
    }
}
