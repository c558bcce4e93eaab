//! Dual scaling and GAP safe spheres.
//!
//! A residual `z = y − Ax` becomes dual feasible once divided by a scaling
//! factor `β(z) ≥ 1`. Two factors are provided: the cumulative one, which is
//! the smallest factor achieving feasibility, and the per-rank one, which
//! compares sorted correlations to weights rank by rank.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::norm::{dual_norm_unchecked, slope_norm_unchecked, sorted_abs};
use crate::problem::{objectives_from_residual, DualPoint, Objectives, ProblemInstance, Weights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingVariant {
    /// `max(1, max_q Σ_{k≤q}|Aᵀz|_[k] / (λ Σ_{k≤q} w_k))`
    #[default]
    Full,
    /// `max(1, max_k |Aᵀz|_[k] / (λ w_k))`
    Max,
}

/// Cumulative dual scaling factor from precomputed correlations `Aᵀz`.
pub fn beta_full(atz: &[f64], lambda: f64, w: &Weights) -> Result<f64> {
    check_len("correlations", w.len(), atz.len())?;
    Ok(beta_full_unchecked(atz, lambda, w.as_slice()))
}

fn beta_full_unchecked(atz: &[f64], lambda: f64, w: &[f64]) -> f64 {
    (dual_norm_unchecked(atz, w) / lambda).max(1.0)
}

/// Per-rank dual scaling factor. Fails when a zero weight faces a nonzero
/// correlation, since the ratio is then unbounded.
pub fn beta_max(atz: &[f64], lambda: f64, w: &Weights) -> Result<f64> {
    check_len("correlations", w.len(), atz.len())?;
    beta_max_unchecked(atz, lambda, w.as_slice())
}

fn beta_max_unchecked(atz: &[f64], lambda: f64, w: &[f64]) -> Result<f64> {
    let mut beta = 1.0_f64;
    for (k, (v, wk)) in sorted_abs(atz).iter().zip(w).enumerate() {
        if *v == 0.0 {
            break;
        }
        if *wk == 0.0 {
            return Err(Error::ZeroWeightScaling { rank: k, value: *v });
        }
        beta = beta.max(v / (lambda * wk));
    }
    Ok(beta)
}

pub fn beta(atz: &[f64], lambda: f64, w: &Weights, variant: ScalingVariant) -> Result<f64> {
    match variant {
        ScalingVariant::Full => beta_full(atz, lambda, w),
        ScalingVariant::Max => beta_max(atz, lambda, w),
    }
}

/// Feasible dual point `(y − Ax)/β(y − Ax)`.
pub fn make_dual_point(p: &ProblemInstance, x: &[f64], variant: ScalingVariant) -> Result<DualPoint> {
    check_len("primal iterate", p.n(), x.len())?;
    Ok(scaled_residual(p, x, variant)?.dual)
}

/// Scaled dual point (with its cached correlations) and the objectives of
/// the pair, from a single residual evaluation.
#[derive(Debug, Clone)]
pub(crate) struct ScaledResidual {
    pub dual: DualPoint,
    pub objectives: Objectives,
}

pub(crate) fn scaled_residual(p: &ProblemInstance, x: &[f64], variant: ScalingVariant) -> Result<ScaledResidual> {
    let residual = p.residual(x);
    let mut atz = p.dict().rmatvec(&residual);
    let w = p.weights().as_slice();
    let beta = match variant {
        ScalingVariant::Full => beta_full_unchecked(&atz, p.lambda(), w),
        ScalingVariant::Max => beta_max_unchecked(&atz, p.lambda(), w)?,
    };
    let u: Vec<f64> = residual.iter().map(|r| r / beta).collect();
    atz.iter_mut().for_each(|v| *v /= beta);
    let dual = DualPoint::from_parts(u, atz);
    let omega = slope_norm_unchecked(x, w);
    let objectives = objectives_from_residual(p, x, &residual, omega, &dual);
    Ok(ScaledResidual { dual, objectives })
}

/// Ball `S(center, radius)` in the dual space known to contain the dual
/// optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeSphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl SafeSphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("sphere radius must be nonnegative, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, point: &[f64], slack: f64) -> bool {
        let d2: f64 = self.center.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.sqrt() <= self.radius + slack
    }
}

/// GAP sphere radius `R₀ + sqrt(2·max(0, gap))`; the dual objective is
/// 1-strongly concave for the squared loss.
pub fn gap_radius(gap: f64, r0: f64) -> f64 {
    r0 + (2.0 * gap.max(0.0)).sqrt()
}

/// Relative size of the roundoff in a computed duality gap.
const GAP_ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Smallest gap a screening radius may be built from. A computed gap below
/// roundoff, or clamped to zero, does not certify a smaller sphere.
pub fn gap_floor(primal: f64) -> f64 {
    GAP_ROUNDOFF * primal.abs().max(1.0)
}

/// Radius used for screening: [`gap_radius`] with the gap raised to
/// [`gap_floor`].
pub fn screening_radius(objectives: &Objectives, r0: f64) -> f64 {
    gap_radius(objectives.gap.max(gap_floor(objectives.primal)), r0)
}

/// GAP safe sphere centered at `u` with radius `r0 + sqrt(2·(P(x) − D(u)))`.
pub fn make_gap_sphere(p: &ProblemInstance, x: &[f64], u: &DualPoint, r0: f64) -> Result<SafeSphere> {
    let obj = crate::problem::objectives(p, x, u)?;
    if !(r0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("R0 must be nonnegative, got {r0}")));
    }
    SafeSphere::new(u.u().to_vec(), gap_radius(obj.gap, r0))
}
