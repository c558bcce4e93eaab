use serde::{Deserialize, Serialize};

use super::{run_parallel, ExperimentConfig, SolverKind};
use crate::dual::{gap_floor, gap_radius, make_dual_point, ScalingVariant};
use crate::error::Result;
use crate::problem::objectives;
use crate::screening::{screen, ScreenParams, SortedCorrelations, Strategy};
use crate::solver::{solve_with_screening, ExitReason, SolveOptions};

const REFERENCE_MAX_ITERS: usize = 5_000_000;

/// One line of the detection table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub trial: usize,
    pub r0: f64,
    pub strategy: Strategy,
    /// Percentage of the reference zeros certified by the test; NaN when
    /// the reference solution has no zero.
    pub detection_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialDetection {
    pub trial: usize,
    /// Number of reference coefficients at or below the zero threshold.
    pub zeros: usize,
    /// Duality gap of the reference solution.
    pub reference_gap: f64,
    /// Whether the reference solve reached the requested gap.
    pub converged: bool,
    pub rows: Vec<DetectionRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub trials: Vec<TrialDetection>,
}

impl DetectionResult {
    pub fn rows(&self) -> Vec<DetectionRow> {
        self.trials.iter().flat_map(|t| t.rows.iter().copied()).collect()
    }

    /// Trials whose reference solution had no zero coefficient.
    pub fn skipped(&self) -> Vec<usize> {
        self.trials.iter().filter(|t| t.zeros == 0).map(|t| t.trial).collect()
    }

    /// Trials whose reference solve stopped before the requested gap.
    pub fn unconverged(&self) -> Vec<usize> {
        self.trials.iter().filter(|t| !t.converged).map(|t| t.trial).collect()
    }

    /// Mean detection percentage per `(r0, strategy)`, skipping undefined rows.
    pub fn mean_curve(&self, strategy: Strategy) -> Vec<(f64, f64)> {
        let mut curve: Vec<(f64, f64, usize)> = Vec::new();
        for row in self
            .rows()
            .into_iter()
            .filter(|r| r.strategy == strategy && !r.detection_pct.is_nan())
        {
            match curve.iter_mut().find(|c| c.0 == row.r0) {
                Some(c) => {
                    c.1 += row.detection_pct;
                    c.2 += 1;
                }
                None => curve.push((row.r0, row.detection_pct, 1)),
            }
        }
        curve.sort_by(|a, b| a.0.total_cmp(&b.0));
        curve.into_iter().map(|(r0, sum, k)| (r0, sum / k as f64)).collect()
    }
}

/// Strategies compared by the detection experiment.
pub const DETECTION_STRATEGIES: [Strategy; 3] = [Strategy::R1, Strategy::Rq, Strategy::AllFast];

/// Solves trial `trial` to the reference gap, then measures which fraction
/// of its zeros each test certifies on GAP spheres of growing radius.
pub fn detection_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialDetection> {
    cfg.validate()?;
    let p = cfg.instance(trial)?;
    // screening is safe, so it only speeds up the reference solve
    let opts = SolverKind::PgAll.options(&SolveOptions {
        gap_tol: cfg.reference_gap,
        max_iters: REFERENCE_MAX_ITERS,
        screen_every: cfg.screen_every,
        record_trace: false,
        ..SolveOptions::default()
    });
    let result = solve_with_screening(&p, &opts)?;
    let x = result.x;
    let u = make_dual_point(&p, &x, ScalingVariant::Full)?;
    let obj = objectives(&p, &x, &u)?;
    let gap = obj.gap;
    // the reference is only certified to the requested gap
    let certified = gap.max(cfg.reference_gap).max(gap_floor(obj.primal));
    let zero: Vec<bool> = x.iter().map(|v| v.abs() <= cfg.zero_threshold).collect();
    let zeros = zero.iter().filter(|z| **z).count();

    let sc = SortedCorrelations::from_correlations(u.correlations());
    let mut rows = Vec::with_capacity(cfg.r0_grid.len() * DETECTION_STRATEGIES.len());
    for &r0 in &cfg.r0_grid {
        let params = ScreenParams::new(p.lambda(), gap_radius(certified, r0));
        for strategy in DETECTION_STRATEGIES {
            let detection_pct = if zeros == 0 {
                f64::NAN
            } else {
                let out = screen(&sc, p.weights(), params, strategy)?;
                let hits = out.screened.iter().filter(|&&j| zero[j]).count();
                100.0 * hits as f64 / zeros as f64
            };
            rows.push(DetectionRow {
                trial,
                r0,
                strategy,
                detection_pct,
            });
        }
    }
    Ok(TrialDetection {
        trial,
        zeros,
        reference_gap: gap,
        converged: result.exit == ExitReason::Tolerance,
        rows,
    })
}

/// Runs [`detection_trial`] for every trial on `jobs` threads.
pub fn detection_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<DetectionResult> {
    cfg.validate()?;
    let trials = run_parallel(cfg.trials, jobs, |t| detection_trial(cfg, t))?;
    Ok(DetectionResult { trials })
}
