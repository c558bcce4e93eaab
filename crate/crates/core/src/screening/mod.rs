//! Safe screening tests for SLOPE.
//!
//! Every test takes the correlations `|Aᵀc|` of a sphere center `c`, sorted
//! in descending order, together with the sphere radius `R`. An atom that
//! passes is certified to be zero at every minimizer as long as the sphere
//! contains the dual optimum.
//!
//! Three strategies are provided:
//!
//! * [`test_r1`] fixes the free index `r_q = 1` for every `q`;
//! * [`test_rq`] fixes `r_q = q`, which collapses to a single comparison
//!   against the smallest weight;
//! * [`screen_all_fast`] evaluates every choice of the free indices jointly,
//!   backward from the least correlated atom, with `O(n)` precomputed tables.
//!
//! [`screen_all_bruteforce`] evaluates the same joint test by enumeration and
//! exists to cross-check the fast path.

mod brute;
mod simple;
mod tables;

use serde::{Deserialize, Serialize};

pub use brute::{screen_all_bruteforce, BRUTE_FORCE_MAX_N};
pub use simple::{test_r1, test_rq};
pub use tables::{build_threshold_tables, build_threshold_tables_with, check_atom, screen_all_fast, AtomCheck, ThresholdTables, TieBreak};

use crate::error::{check_len, Error, Result};
use crate::norm::sort_desc_abs;
use crate::problem::{Dictionary, Weights};

/// `|Aᵀc|` in descending order with the permutation back to column indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedCorrelations {
    v: Vec<f64>,
    perm: Vec<usize>,
}

impl SortedCorrelations {
    /// Sorts raw (signed) correlations; ties keep ascending column order.
    pub fn from_correlations(correlations: &[f64]) -> Self {
        let perm = sort_desc_abs(correlations);
        let v = perm.iter().map(|&j| correlations[j].abs()).collect();
        Self { v, perm }
    }

    /// Sorted values at each rank.
    pub fn values(&self) -> &[f64] {
        &self.v
    }

    /// `perm()[k]` is the column at rank `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Values back in column order, i.e. `|Aᵀc|`.
    pub fn unsorted(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.v.len()];
        for (k, &j) in self.perm.iter().enumerate() {
            out[j] = self.v[k];
        }
        out
    }

    fn ranks_to_mask(&self, passing_ranks: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mask = vec![false; self.v.len()];
        for k in passing_ranks {
            mask[self.perm[k]] = true;
        }
        mask
    }
}

/// Computes `|Aᵀc|` and sorts it.
pub fn sort_correlations(dict: &Dictionary, center: &[f64]) -> Result<SortedCorrelations> {
    check_len("sphere center", dict.rows(), center.len())?;
    Ok(SortedCorrelations::from_correlations(&dict.rmatvec(center)))
}

/// Scalar inputs shared by every test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenParams {
    pub lambda: f64,
    pub radius: f64,
    /// Subtracted from every threshold; zero reproduces the exact tests.
    pub margin: f64,
}

impl ScreenParams {
    pub fn new(lambda: f64, radius: f64) -> Self {
        Self {
            lambda,
            radius,
            margin: 0.0,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "screening radius must be nonnegative, got {}",
                self.radius
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "safety margin must be nonnegative, got {}",
                self.margin
            )));
        }
        Ok(())
    }
}

/// `κ_{q,r} = λ Σ_{k=r}^{q} w_k − (q − r + 1) R` with 1-based ranks `r ≤ q`.
pub fn kappa(lambda: f64, w: &Weights, radius: f64, q: usize, r: usize) -> Result<f64> {
    if r < 1 || r > q || q > w.len() {
        return Err(Error::InvalidArgument(format!(
            "kappa needs 1 <= r <= q <= n, got r = {r}, q = {q}, n = {}",
            w.len()
        )));
    }
    let sum: f64 = w.as_slice()[r - 1..q].iter().sum();
    Ok(lambda * sum - (q - r + 1) as f64 * radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `r_q = 1` for every `q`.
    R1,
    /// `r_q = q` for every `q`.
    Rq,
    /// Joint test over every choice of `r_q`, fast backward recursion.
    #[serde(rename = "all", alias = "all_fast")]
    AllFast,
    /// Joint test by enumeration.
    AllBrute,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::R1 => "r1",
            Strategy::Rq => "rq",
            Strategy::AllFast => "all",
            Strategy::AllBrute => "all_brute",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1" => Ok(Strategy::R1),
            "rq" => Ok(Strategy::Rq),
            "all" | "all_fast" => Ok(Strategy::AllFast),
            "all_brute" => Ok(Strategy::AllBrute),
            other => Err(Error::InvalidArgument(format!("unknown screening strategy {other:?}"))),
        }
    }
}

/// Result of one screening round.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenOutcome {
    /// Certified-zero column indices, ascending.
    pub screened: Vec<usize>,
    pub sorted: SortedCorrelations,
    pub strategy: Strategy,
    pub radius: f64,
    /// Number of threshold comparisons performed.
    pub thresholds_visited: usize,
}

impl ScreenOutcome {
    fn from_mask(sorted: SortedCorrelations, mask: &[bool], strategy: Strategy, radius: f64, visited: usize) -> Self {
        let screened = mask.iter().enumerate().filter_map(|(j, &s)| s.then_some(j)).collect();
        Self {
            screened,
            sorted,
            strategy,
            radius,
            thresholds_visited: visited,
        }
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.sorted.len()];
        for &j in &self.screened {
            mask[j] = true;
        }
        mask
    }

    pub fn report(&self) -> ScreenReport {
        ScreenReport {
            strategy: self.strategy,
            screened: self.screened.clone(),
            n: self.sorted.len(),
            radius: self.radius,
            thresholds_visited: self.thresholds_visited,
        }
    }
}

/// JSON form of a [`ScreenOutcome`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub strategy: Strategy,
    pub screened: Vec<usize>,
    pub n: usize,
    pub radius: f64,
    pub thresholds_visited: usize,
}

/// Runs one strategy on sorted correlations.
pub fn screen(sc: &SortedCorrelations, w: &Weights, params: ScreenParams, strategy: Strategy) -> Result<ScreenOutcome> {
    check_len("weights", sc.len(), w.len())?;
    params.validate()?;
    match strategy {
        Strategy::R1 => {
            let (mask, visited) = simple::r1_mask(sc, w, params);
            Ok(ScreenOutcome::from_mask(sc.clone(), &mask, strategy, params.radius, visited))
        }
        Strategy::Rq => {
            let mask = simple::rq_mask(&sc.unsorted(), w, params);
            Ok(ScreenOutcome::from_mask(sc.clone(), &mask, strategy, params.radius, sc.len()))
        }
        Strategy::AllFast => screen_all_fast(sc, w, params),
        Strategy::AllBrute => screen_all_bruteforce(sc, w, params),
    }
}
