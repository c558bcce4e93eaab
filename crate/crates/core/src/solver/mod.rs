//! Accelerated proximal gradient (FISTA) for SLOPE with interleaved safe
//! screening.
//!
//! Every `screen_every` iterations the current iterate is turned into a
//! feasible dual point by dual scaling, which yields the duality gap used for
//! stopping. When screening is enabled the same dual point centers a GAP
//! sphere, the configured test runs on it, and certified-zero columns are
//! removed from the working problem. The momentum carries over to the kept
//! coordinates unless `restart_on_reduction` is set.

mod lipschitz;
mod reduce;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use lipschitz::{estimate_lipschitz, LipschitzEstimate};
pub use reduce::{reduce_problem, IndexMap};

use crate::dual::{scaled_residual, screening_radius, ScaledResidual, ScalingVariant};
use crate::error::{Error, Result};
use crate::problem::{DualPoint, ProblemInstance};
use crate::prox::prox_sorted_l1_into;
use crate::screening::{screen, test_rq, ScreenParams, SortedCorrelations, Strategy};

/// Screening applied inside the solver loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenStrategy {
    #[default]
    None,
    R1,
    Rq,
    All,
}

impl ScreenStrategy {
    fn test(self) -> Option<Strategy> {
        match self {
            ScreenStrategy::None => None,
            ScreenStrategy::R1 => Some(Strategy::R1),
            ScreenStrategy::Rq => Some(Strategy::Rq),
            ScreenStrategy::All => Some(Strategy::AllFast),
        }
    }
}

impl std::str::FromStr for ScreenStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "no" => Ok(ScreenStrategy::None),
            "r1" => Ok(ScreenStrategy::R1),
            "rq" => Ok(ScreenStrategy::Rq),
            "all" => Ok(ScreenStrategy::All),
            other => Err(Error::InvalidArgument(format!("unknown screening strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Stop once the duality gap is at or below this value.
    pub gap_tol: f64,
    pub max_iters: usize,
    /// Wall-clock budget in seconds, checked once per iteration.
    pub time_budget: Option<f64>,
    pub screen_strategy: ScreenStrategy,
    /// Gap evaluation and screening cadence, in iterations.
    pub screen_every: usize,
    pub scaling_variant: ScalingVariant,
    pub safety_margin: f64,
    pub record_trace: bool,
    /// Re-estimate the step size after every reduction. The original value
    /// stays a valid upper bound, so this is off by default.
    pub recompute_lipschitz: bool,
    /// Reset the momentum after every reduction instead of carrying the
    /// extrapolation point over to the kept coordinates.
    pub restart_on_reduction: bool,
    /// Known upper bound on `σ_max(A)²`; estimated by power iteration when
    /// absent.
    pub lipschitz: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            max_iters: 1_000_000,
            time_budget: None,
            screen_strategy: ScreenStrategy::None,
            screen_every: 20,
            scaling_variant: ScalingVariant::Full,
            safety_margin: 0.0,
            record_trace: true,
            recompute_lipschitz: false,
            restart_on_reduction: false,
            lipschitz: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bounded = self.gap_tol > 0.0 || self.max_iters < usize::MAX || self.time_budget.is_some();
        if !bounded {
            return Err(Error::InvalidArgument("solver needs a finite stopping criterion".into()));
        }
        if !(self.gap_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("gap_tol must be nonnegative, got {}", self.gap_tol)));
        }
        if self.screen_every == 0 {
            return Err(Error::InvalidArgument("screen_every must be positive".into()));
        }
        if let Some(t) = self.time_budget {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("time budget must be positive, got {t}")));
            }
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "lipschitz constant must be positive and finite, got {l}"
                )));
            }
        }
        if !(self.safety_margin >= 0.0) {
            return Err(Error::InvalidArgument("safety margin must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitReason {
    Tolerance,
    MaxIters,
    TimeBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time_s: f64,
    pub iter: usize,
    pub gap: f64,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Primal solution in original coordinates, exactly zero where screened.
    pub x: Vec<f64>,
    /// Final dual point. It is feasible for the screened problem; its
    /// correlations are recomputed against the full dictionary.
    pub u: DualPoint,
    pub gap: f64,
    pub iterations: usize,
    pub exit: ExitReason,
    /// Screened columns, ascending.
    pub screened: Vec<usize>,
    pub trace: Vec<TraceRow>,
    pub lipschitz: LipschitzEstimate,
    pub wall_time_s: f64,
}

impl SolveResult {
    pub fn screened_total(&self) -> usize {
        self.screened.len()
    }

    pub fn report(&self) -> SolveReport {
        SolveReport {
            x: self.x.clone(),
            gap: self.gap,
            iterations: self.iterations,
            exit: self.exit,
            screened: self.screened.clone(),
            trace: self.trace.clone(),
            wall_time_s: self.wall_time_s,
        }
    }
}

/// JSON form of a [`SolveResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub exit: ExitReason,
    pub screened: Vec<usize>,
    pub trace: Vec<TraceRow>,
    pub wall_time_s: f64,
}

/// Plain accelerated proximal gradient, no screening.
pub fn solve(p: &ProblemInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let opts = SolveOptions {
        screen_strategy: ScreenStrategy::None,
        ..opts.clone()
    };
    solve_with_screening(p, &opts)
}

/// Accelerated proximal gradient interleaved with the configured screening.
pub fn solve_with_screening(p: &ProblemInstance, opts: &SolveOptions) -> Result<SolveResult> {
    solve_observed(p, opts, |_| {})
}

/// State handed to the observer at every gap evaluation.
#[derive(Debug)]
pub struct RoundInfo<'a> {
    pub iter: usize,
    /// Working (possibly reduced) problem and its index map.
    pub problem: &'a ProblemInstance,
    pub map: &'a IndexMap,
    /// Current iterate in working coordinates.
    pub x: &'a [f64],
    pub dual: &'a DualPoint,
    pub gap: f64,
    pub primal: f64,
    /// Columns (original indices) removed in this round.
    pub newly_screened: &'a [usize],
}

/// Like [`solve_with_screening`], calling `observer` at every gap evaluation.
pub fn solve_observed<F>(p: &ProblemInstance, opts: &SolveOptions, mut observer: F) -> Result<SolveResult>
where
    F: FnMut(&RoundInfo<'_>),
{
    opts.validate()?;
    let start = Instant::now();
    let budget = opts.time_budget.map(Duration::from_secs_f64);
    let test = opts.screen_strategy.test();

    let lipschitz = match opts.lipschitz {
        Some(value) => LipschitzEstimate { value, fallback: false },
        None => estimate_lipschitz(p.dict()),
    };
    let mut step = if lipschitz.value > 0.0 { 1.0 / lipschitz.value } else { 0.0 };

    let mut work = p.clone();
    let mut map = IndexMap::identity(p.n());
    let mut x = vec![0.0; p.n()];
    let mut z = x.clone();
    let mut t = 1.0_f64;

    let mut az = vec![0.0; p.m()];
    let mut grad = vec![0.0; p.n()];
    let mut x_next = vec![0.0; p.n()];

    let mut trace = Vec::new();
    let mut iter = 0usize;
    // evaluation valid for the current (work, x), if any
    let mut current: Option<ScaledResidual> = None;

    let exit = loop {
        if iter.is_multiple_of(opts.screen_every) {
            let eval = scaled_residual(&work, &x, opts.scaling_variant)?;
            let gap = eval.objectives.gap;
            if opts.record_trace {
                trace.push(TraceRow {
                    time_s: start.elapsed().as_secs_f64(),
                    iter,
                    gap,
                    dim: work.n(),
                });
            }

            let mut newly: Vec<usize> = Vec::new();
            if gap > opts.gap_tol {
                if let Some(strategy) = test {
                    let params = ScreenParams::new(work.lambda(), screening_radius(&eval.objectives, 0.0)).with_margin(opts.safety_margin);
                    let drop = if strategy == Strategy::Rq {
                        // a fixed threshold, so no sorting is needed
                        test_rq(eval.dual.correlations(), work.weights(), params)?
                    } else {
                        let sc = SortedCorrelations::from_correlations(eval.dual.correlations());
                        screen(&sc, work.weights(), params, strategy)?.mask()
                    };
                    if drop.iter().any(|d| *d) {
                        newly = (0..work.n()).filter(|&j| drop[j]).map(|j| map.kept()[j]).collect();
                        let keep: Vec<usize> = (0..work.n()).filter(|&j| !drop[j]).collect();
                        observer(&RoundInfo {
                            iter,
                            problem: &work,
                            map: &map,
                            x: &x,
                            dual: &eval.dual,
                            gap,
                            primal: eval.objectives.primal,
                            newly_screened: &newly,
                        });
                        work = reduce::restrict(&work, &keep);
                        map = map.compose(&keep);
                        x = keep.iter().map(|&j| x[j]).collect();
                        if opts.restart_on_reduction {
                            z = x.clone();
                            t = 1.0;
                        } else {
                            z = keep.iter().map(|&j| z[j]).collect();
                        }
                        grad.truncate(keep.len());
                        x_next.truncate(keep.len());
                        if opts.recompute_lipschitz {
                            let l = estimate_lipschitz(work.dict());
                            if l.value > 0.0 {
                                step = 1.0 / l.value;
                            }
                        }
                        current = None;
                    }
                }
            }
            if newly.is_empty() {
                observer(&RoundInfo {
                    iter,
                    problem: &work,
                    map: &map,
                    x: &x,
                    dual: &eval.dual,
                    gap,
                    primal: eval.objectives.primal,
                    newly_screened: &[],
                });
                current = Some(eval);
                if gap <= opts.gap_tol {
                    break ExitReason::Tolerance;
                }
            }
        }
        if iter >= opts.max_iters {
            break ExitReason::MaxIters;
        }
        if budget.is_some_and(|b| start.elapsed() >= b) {
            break ExitReason::TimeBudget;
        }

        // z ← momentum point; x_next = prox(z − step·Aᵀ(Az − y))
        work.dict().matvec_into(&z, &mut az);
        az.iter_mut().zip(work.y()).for_each(|(a, y)| *a -= y);
        work.dict().rmatvec_into(&az, &mut grad);
        grad.iter_mut().zip(&z).for_each(|(g, zi)| *g = zi - step * *g);
        prox_sorted_l1_into(&grad, step * work.lambda(), work.weights().as_slice(), &mut x_next);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for ((zi, xn), xi) in z.iter_mut().zip(&x_next).zip(x.iter()) {
            *zi = xn + momentum * (xn - xi);
        }
        std::mem::swap(&mut x, &mut x_next);
        t = t_next;
        iter += 1;
        current = None;
    };

    let eval = match current {
        Some(e) => e,
        None => scaled_residual(&work, &x, opts.scaling_variant)?,
    };
    let gap = eval.objectives.gap;
    let x_full = map.embed(&x);
    let u = eval.dual.into_vec();
    let correlations = p.dict().rmatvec(&u);
    let wall_time_s = start.elapsed().as_secs_f64();
    if opts.record_trace && trace.last().is_none_or(|row| row.iter != iter) {
        trace.push(TraceRow {
            time_s: wall_time_s,
            iter,
            gap,
            dim: work.n(),
        });
    }
    Ok(SolveResult {
        x: x_full,
        u: DualPoint::from_parts(u, correlations),
        gap,
        iterations: iter,
        exit,
        screened: map.dropped(),
        trace,
        lipschitz,
        wall_time_s,
    })
}
