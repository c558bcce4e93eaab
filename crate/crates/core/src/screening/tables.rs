//! Joint test over every choice of free indices, in `O(n log n + q_s·T)`.
//!
//! Ranks are 0-based here. With `v` sorted descending define
//!
//! ```text
//! g(r)     = Σ_{k≥r} (λ w_k − v_k − R)
//! τ(q, r)  = g(r) − g(q) + λ w_q − R              (r ≤ q)
//! r*(q)    = argmax_{r≤q} g(r)
//! q*(k)    = argmax_{q≤k} g(q) − λ w_q
//! ```
//!
//! The atom at rank `ℓ` passes, given that every rank above it passed, iff
//! `v_ℓ < τ(q, r*(q))` along the chain `q ← q*(ℓ)`, `q ← q*(r*(q) − 1)`
//! that stops once `r*(q)` is the first rank.

use super::{ScreenOutcome, ScreenParams, SortedCorrelations, Strategy};
use crate::error::{check_len, Result};
use crate::problem::Weights;

/// How to break ties inside the argmax tables. The thresholds met along the
/// chain do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Smallest,
    Largest,
}

/// Precomputed `g`, `r*` and `q*` for one sorted correlation vector and
/// radius, all indexed by 0-based rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTables {
    pub g: Vec<f64>,
    pub r_star: Vec<usize>,
    pub q_star: Vec<usize>,
}

pub fn build_threshold_tables(sc: &SortedCorrelations, w: &Weights, params: ScreenParams) -> Result<ThresholdTables> {
    build_threshold_tables_with(sc, w, params, TieBreak::Smallest)
}

pub fn build_threshold_tables_with(sc: &SortedCorrelations, w: &Weights, params: ScreenParams, tie: TieBreak) -> Result<ThresholdTables> {
    check_len("weights", sc.len(), w.len())?;
    params.validate()?;
    Ok(tables(sc.values(), w.as_slice(), params, tie))
}

fn tables(v: &[f64], w: &[f64], params: ScreenParams, tie: TieBreak) -> ThresholdTables {
    let n = v.len();
    let ScreenParams { lambda, radius, .. } = params;

    let mut g = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += lambda * w[k] - v[k] - radius;
        g[k] = acc;
    }

    let better = |candidate: f64, best: f64| match tie {
        TieBreak::Smallest => candidate > best,
        TieBreak::Largest => candidate >= best,
    };
    let prefix_argmax = |score: &dyn Fn(usize) -> f64| {
        let mut out = Vec::with_capacity(n);
        let mut best = 0;
        for k in 0..n {
            if k > 0 && better(score(k), score(best)) {
                best = k;
            }
            out.push(best);
        }
        out
    };
    let r_star = prefix_argmax(&|r| g[r]);
    let q_star = prefix_argmax(&|q| g[q] - lambda * w[q]);

    ThresholdTables { g, r_star, q_star }
}

/// Outcome of [`check_atom`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomCheck {
    pub pass: bool,
    /// Thresholds compared along the chain.
    pub visited: usize,
}

/// Evaluates the chain of thresholds for the atom at 0-based `rank` with
/// sorted correlation `v_rank`. Only meaningful when every rank above
/// `rank` has already passed.
pub fn check_atom(rank: usize, v_rank: f64, tables: &ThresholdTables, w: &Weights, params: ScreenParams) -> AtomCheck {
    let w = w.as_slice();
    let ScreenParams { lambda, radius, margin } = params;
    let mut q = tables.q_star[rank];
    let mut visited = 0;
    loop {
        let r = tables.r_star[q];
        let tau = tables.g[r] - tables.g[q] + (lambda * w[q] - radius);
        visited += 1;
        if v_rank >= tau - margin {
            return AtomCheck { pass: false, visited };
        }
        if r == 0 {
            return AtomCheck { pass: true, visited };
        }
        q = tables.q_star[r - 1];
    }
}

/// Screens backward from the least correlated atom and stops at the first
/// failure; everything before it fails too.
pub fn screen_all_fast(sc: &SortedCorrelations, w: &Weights, params: ScreenParams) -> Result<ScreenOutcome> {
    let t = build_threshold_tables(sc, w, params)?;
    Ok(run_backward(sc, w, params, &t))
}

pub(crate) fn run_backward(sc: &SortedCorrelations, w: &Weights, params: ScreenParams, t: &ThresholdTables) -> ScreenOutcome {
    let v = sc.values();
    let mut visited = 0;
    let mut first_screened = v.len();
    for rank in (0..v.len()).rev() {
        let check = check_atom(rank, v[rank], t, w, params);
        visited += check.visited;
        if !check.pass {
            break;
        }
        first_screened = rank;
    }
    let mut screened: Vec<usize> = sc.perm()[first_screened..].to_vec();
    screened.sort_unstable();
    ScreenOutcome {
        screened,
        sorted: sc.clone(),
        strategy: Strategy::AllFast,
        radius: params.radius,
        thresholds_visited: visited,
    }
}
