use super::{ScreenOutcome, ScreenParams, SortedCorrelations, Strategy};
use crate::error::{check_len, Error, Result};
use crate::problem::Weights;

/// Cubic cost cap for the enumeration oracle.
pub const BRUTE_FORCE_MAX_N: usize = 2000;

/// Joint test by enumeration. For `ℓ` from the last rank backward, with the
/// ranks after `ℓ` already removed, atom `ℓ` passes iff for every `q ≤ ℓ`
/// some `r ≤ q` gives `v_ℓ + Σ_{k=r}^{q−1} v_k < κ_{q,r}`. Stops at the
/// first failure, like the fast recursion.
pub fn screen_all_bruteforce(sc: &SortedCorrelations, w: &Weights, params: ScreenParams) -> Result<ScreenOutcome> {
    check_len("weights", sc.len(), w.len())?;
    params.validate()?;
    let n = sc.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeGuard {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let v = sc.values();
    let w = w.as_slice();
    let ScreenParams { lambda, radius, margin } = params;

    let mut visited = 0;
    let mut first_screened = n;
    'atoms: for atom in (0..n).rev() {
        for q in 0..=atom {
            let mut some_r = false;
            let mut v_sum = 0.0;
            let mut w_sum = 0.0;
            for r in (0..=q).rev() {
                if r < q {
                    v_sum += v[r];
                }
                w_sum += w[r];
                let kappa = lambda * w_sum - (q - r + 1) as f64 * radius;
                visited += 1;
                if v[atom] + v_sum < kappa - margin {
                    some_r = true;
                    break;
                }
            }
            if !some_r {
                break 'atoms;
            }
        }
        first_screened = atom;
    }

    let mut screened: Vec<usize> = sc.perm()[first_screened..].to_vec();
    screened.sort_unstable();
    Ok(ScreenOutcome {
        screened,
        sorted: sc.clone(),
        strategy: Strategy::AllBrute,
        radius,
        thresholds_visited: visited,
    })
}
