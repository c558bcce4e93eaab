use super::{ScreenParams, SortedCorrelations};
use crate::error::{check_len, Result};
use crate::problem::Weights;

/// Test with `r_q = 1`: atom `ℓ` passes iff for every `q`
/// `|a_ℓᵀc| + Σ_{k<q} |A_{∖ℓ}ᵀc|_[k] < λ Σ_{k≤q} w_k − qR`.
///
/// Returns a mask over column indices.
pub fn test_r1(sc: &SortedCorrelations, w: &Weights, params: ScreenParams) -> Result<Vec<bool>> {
    check_len("weights", sc.len(), w.len())?;
    params.validate()?;
    Ok(r1_mask(sc, w, params).0)
}

pub(super) fn r1_mask(sc: &SortedCorrelations, w: &Weights, params: ScreenParams) -> (Vec<bool>, usize) {
    let v = sc.values();
    let n = v.len();
    let mut prefix = vec![0.0; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + v[k];
    }
    let wsum = w.prefix_sums();
    let rhs: Vec<f64> = (0..n)
        .map(|k| params.lambda * wsum[k] - (k + 1) as f64 * params.radius - params.margin)
        .collect();

    let mut visited = 0;
    let mut passing = Vec::new();
    for (rank, &vr) in v.iter().enumerate() {
        let mut pass = true;
        for q in 1..=n {
            visited += 1;
            // the q−1 largest correlations once rank is removed
            let others = if q - 1 <= rank { prefix[q - 1] } else { prefix[q] - vr };
            if vr + others >= rhs[q - 1] {
                pass = false;
                break;
            }
        }
        if pass {
            passing.push(rank);
        }
    }
    (sc.ranks_to_mask(passing), visited)
}

/// Test with `r_q = q`: atom `ℓ` passes iff `|a_ℓᵀc| < λ w_n − R`.
///
/// Takes the correlations in column order; no sorting is needed.
pub fn test_rq(correlations: &[f64], w: &Weights, params: ScreenParams) -> Result<Vec<bool>> {
    check_len("weights", correlations.len(), w.len())?;
    params.validate()?;
    Ok(rq_mask(correlations, w, params))
}

pub(super) fn rq_mask(correlations: &[f64], w: &Weights, params: ScreenParams) -> Vec<bool> {
    if w.is_empty() {
        return Vec::new();
    }
    let threshold = params.lambda * w.last() - params.radius - params.margin;
    correlations.iter().map(|c| c.abs() < threshold).collect()
}
