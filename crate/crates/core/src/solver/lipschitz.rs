use serde::Serialize;

use crate::problem::{norm_sq, Dictionary};

const REL_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 5000;
/// Inflation applied to the power-iteration estimate, which approaches
/// `σ_max²` from below.
const SAFETY_FACTOR: f64 = 1.01;

/// Step-size constant for the gradient of `½‖y − Ax‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub value: f64,
    /// Set when power iteration did not converge and `‖A‖_F²` was used.
    pub fallback: bool,
}

/// Upper bound on `σ_max(A)²` by power iteration on `AᵀA`.
pub fn estimate_lipschitz(dict: &Dictionary) -> LipschitzEstimate {
    let n = dict.cols();
    let frobenius = LipschitzEstimate {
        value: dict.frobenius_sq(),
        fallback: true,
    };
    if n == 0 {
        return LipschitzEstimate {
            value: 0.0,
            fallback: false,
        };
    }

    // deterministic start with no special alignment to sign patterns
    let mut v: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * (1.0 + 0.754_877_666 * j as f64).sin()).collect();
    let norm = norm_sq(&v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut av = vec![0.0; dict.rows()];
    let mut w = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..MAX_ITERS {
        dict.matvec_into(&v, &mut av);
        dict.rmatvec_into(&av, &mut w);
        let next = norm_sq(&w).sqrt();
        if next == 0.0 {
            // start vector in the null space; ‖A‖_F² is still valid
            return frobenius;
        }
        w.iter().zip(v.iter_mut()).for_each(|(wi, vi)| *vi = wi / next);
        if (next - estimate).abs() <= REL_TOL * next {
            return LipschitzEstimate {
                value: SAFETY_FACTOR * next,
                fallback: false,
            };
        }
        estimate = next;
    }
    frobenius
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_columns() {
        let d = Dictionary::from_col_major(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let l = estimate_lipschitz(&d);
        assert!(!l.fallback);
        assert!(l.value >= 1.0 && l.value <= 1.01 + 1e-12);
    }

    #[test]
    fn duplicated_column() {
        let d = Dictionary::from_col_major(2, 2, vec![0.6, 0.8, 0.6, 0.8]).unwrap();
        let l = estimate_lipschitz(&d);
        assert!(l.value >= 2.0 && l.value <= 2.02 + 1e-12, "{l:?}");
    }

    #[test]
    fn opposite_columns() {
        let d = Dictionary::from_col_major(2, 2, vec![1.0, 0.0, -1.0, 0.0]).unwrap();
        let l = estimate_lipschitz(&d);
        assert!(l.value >= 2.0 && l.value <= 2.02 + 1e-12, "{l:?}");
    }
}
