//! The sorted-L1 (SLOPE) norm, its dual norm and the subdifferential test.
//!
//! All sorts are descending in absolute value with ties broken by ascending
//! original index, so every routine here is deterministic.

use crate::error::{check_len, Result};
use crate::problem::Weights;

/// Permutation sorting `|values|` in descending order; `perm[k]` is the
/// original index of the entry at rank `k`.
pub fn sort_desc_abs(values: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    // stable sort keeps ascending index order inside ties
    perm.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    perm
}

/// `|values|` sorted in descending order.
pub fn sorted_abs(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Σ_k w_k |x|_[k].
pub fn slope_norm(x: &[f64], w: &Weights) -> Result<f64> {
    check_len("slope_norm", w.len(), x.len())?;
    Ok(slope_norm_unchecked(x, w.as_slice()))
}

pub(crate) fn slope_norm_unchecked(x: &[f64], w: &[f64]) -> f64 {
    sorted_abs(x)
        .iter()
        .zip(w)
        .take_while(|(v, _)| **v > 0.0)
        .map(|(v, wk)| v * wk)
        .sum()
}

/// max_q (Σ_{k≤q} |g|_[k]) / (Σ_{k≤q} w_k).
///
/// Prefixes with a zero weight sum can only occur once `g` has been exhausted
/// of its leading entries, which never happens because `w_1 > 0`; trailing
/// zero weights simply grow the numerator against a constant denominator.
pub fn dual_norm(g: &[f64], w: &Weights) -> Result<f64> {
    check_len("dual_norm", w.len(), g.len())?;
    Ok(dual_norm_unchecked(g, w.as_slice()))
}

pub(crate) fn dual_norm_unchecked(g: &[f64], w: &[f64]) -> f64 {
    let sorted = sorted_abs(g);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut best = 0.0_f64;
    for (v, wk) in sorted.iter().zip(w) {
        num += v;
        den += wk;
        if num > 0.0 {
            best = best.max(num / den);
        }
    }
    best
}

/// Largest violation `max_q (Σ_{k≤q} |g|_[k] − scale·Σ_{k≤q} w_k)`; nonpositive
/// iff `g` lies in the scaled dual ball.
pub(crate) fn cumulative_excess(g: &[f64], w: &[f64], scale: f64) -> f64 {
    let sorted = sorted_abs(g);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (v, wk) in sorted.iter().zip(w) {
        num += v;
        den += wk;
        worst = worst.max(num - scale * den);
    }
    worst
}

/// Tests `g ∈ ∂Ω(x)` up to `tol`: `⟨g, x⟩ = Ω(x)` and every cumulative sum of
/// the sorted `|g|` stays below the matching cumulative weight sum.
pub fn subdiff_membership(x: &[f64], g: &[f64], w: &Weights, tol: f64) -> bool {
    if x.len() != g.len() || x.len() != w.len() {
        return false;
    }
    let inner: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    let omega = slope_norm_unchecked(x, w.as_slice());
    (inner - omega).abs() <= tol && cumulative_excess(g, w.as_slice(), 1.0) <= tol
}
