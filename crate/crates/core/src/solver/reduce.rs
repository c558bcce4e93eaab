use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Weights};

/// Columns kept by a reduction, in their original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    kept: Vec<usize>,
    n_original: usize,
}

impl IndexMap {
    pub fn identity(n: usize) -> Self {
        Self {
            kept: (0..n).collect(),
            n_original: n,
        }
    }

    /// `kept()[j]` is the original column of reduced column `j`.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }

    /// Original indices that were dropped, ascending.
    pub fn dropped(&self) -> Vec<usize> {
        let mut keep = vec![false; self.n_original];
        self.kept.iter().for_each(|&j| keep[j] = true);
        (0..self.n_original).filter(|&j| !keep[j]).collect()
    }

    /// Places a reduced vector back into the original coordinates with
    /// exact zeros at the dropped columns.
    pub fn embed(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_original];
        for (&j, v) in self.kept.iter().zip(reduced) {
            out[j] = *v;
        }
        out
    }

    /// Composes with a further reduction that keeps the listed positions of
    /// this map.
    pub(crate) fn compose(&self, keep_positions: &[usize]) -> Self {
        Self {
            kept: keep_positions.iter().map(|&p| self.kept[p]).collect(),
            n_original: self.n_original,
        }
    }
}

/// Drops the screened columns and keeps the leading `n − |screened|`
/// weights: certified zeros occupy the lowest ranks of `|x*|`, so surviving
/// coordinates only meet the largest weights.
pub fn reduce_problem(p: &ProblemInstance, screened: &[usize]) -> Result<(ProblemInstance, IndexMap)> {
    let n = p.n();
    let mut drop = vec![false; n];
    for &j in screened {
        if j >= n {
            return Err(Error::InvalidArgument(format!("screened index {j} out of range for n = {n}")));
        }
        if drop[j] {
            return Err(Error::InvalidArgument(format!("screened index {j} listed twice")));
        }
        drop[j] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&j| !drop[j]).collect();
    let reduced = restrict(p, &kept);
    Ok((reduced, IndexMap { kept, n_original: n }))
}

pub(crate) fn restrict(p: &ProblemInstance, kept: &[usize]) -> ProblemInstance {
    let weights: Weights = p.weights().truncated(kept.len());
    ProblemInstance::from_parts_unchecked(p.dict().select_columns(kept), p.y().to_vec(), p.lambda(), weights)
}
