//! Proximal operator of the sorted-L1 norm.

use crate::error::{check_len, Result};
use crate::norm::sort_desc_abs;
use crate::problem::Weights;

/// `argmin_x ½‖x − z‖² + step·λ·Ω(x)`.
///
/// Sorts `|z|`, subtracts the scaled weights, projects the result onto the
/// nonincreasing cone with a single stack-based pool-adjacent-violators
/// pass, clips at zero and undoes the sort.
pub fn prox_sorted_l1(z: &[f64], step: f64, lambda: f64, w: &Weights) -> Result<Vec<f64>> {
    check_len("prox input", w.len(), z.len())?;
    let mut out = vec![0.0; z.len()];
    prox_sorted_l1_into(z, step * lambda, w.as_slice(), &mut out);
    Ok(out)
}

/// Same as [`prox_sorted_l1`] with the threshold scale `step·λ` premultiplied.
pub(crate) fn prox_sorted_l1_into(z: &[f64], scale: f64, w: &[f64], out: &mut [f64]) {
    let n = z.len();
    if n == 0 {
        return;
    }
    let perm = sort_desc_abs(z);

    // Blocks of pooled ranks: (first rank, sum, count).
    let mut blocks: Vec<(usize, f64, usize)> = Vec::with_capacity(n);
    for (k, &j) in perm.iter().enumerate() {
        let mut start = k;
        let mut sum = z[j].abs() - scale * w[k];
        let mut count = 1usize;
        while let Some(&(prev_start, prev_sum, prev_count)) = blocks.last() {
            // merge while the new block's mean exceeds its predecessor's
            if sum * prev_count as f64 >= prev_sum * count as f64 {
                blocks.pop();
                start = prev_start;
                sum += prev_sum;
                count += prev_count;
            } else {
                break;
            }
        }
        blocks.push((start, sum, count));
    }

    for &(start, sum, count) in &blocks {
        let value = (sum / count as f64).max(0.0);
        for &j in &perm[start..start + count] {
            out[j] = if z[j] < 0.0 { -value } else { value };
        }
    }
}
