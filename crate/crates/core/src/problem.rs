//! Problem data: weights, unit-norm dictionaries, instances and dual points.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::norm::{cumulative_excess, dual_norm_unchecked, slope_norm_unchecked};

/// Column norms must match 1 to this tolerance after normalization.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Default absolute tolerance for feasibility and membership certificates.
pub const DEFAULT_FEAS_TOL: f64 = 1e-12;

/// Nonincreasing, nonnegative per-rank penalty weights with a positive
/// leading entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weights {
    values: Vec<f64>,
}

impl Weights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let Some(&first) = values.first() else {
            return Err(Error::InvalidWeights("empty weight sequence".into()));
        };
        if !(first > 0.0) || !first.is_finite() {
            return Err(Error::InvalidWeights(format!(
                "leading weight must be positive and finite, got {first}"
            )));
        }
        for (k, pair) in values.windows(2).enumerate() {
            if !(pair[0] >= pair[1]) {
                return Err(Error::InvalidWeights(format!(
                    "weights must be nonincreasing: w[{k}] = {} < w[{}] = {}",
                    pair[0],
                    k + 1,
                    pair[1]
                )));
            }
        }
        if let Some(last) = values.last().filter(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidWeights(format!("weights must be nonnegative, got {last}")));
        }
        Ok(Self { values })
    }

    /// All-equal weights, i.e. the LASSO penalty scaled by `value`.
    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Keeps the leading `n` weights. The result may be empty, which only
    /// arises for fully screened problems.
    pub fn truncated(&self, n: usize) -> Weights {
        Weights {
            values: self.values[..n.min(self.values.len())].to_vec(),
        }
    }

    /// `out[q] = Σ_{k≤q} w_k` (0-based ranks).
    pub fn prefix_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for Weights {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Weights::new(values)
    }
}

impl From<Weights> for Vec<f64> {
    fn from(w: Weights) -> Self {
        w.values
    }
}

/// Dense `m × n` matrix with unit-norm columns, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl Dictionary {
    /// Builds from column-major data, rescaling every column to unit norm.
    pub fn from_col_major(m: usize, n: usize, mut data: Vec<f64>) -> Result<Self> {
        check_len("dictionary data", m * n, data.len())?;
        if m == 0 {
            return Err(Error::InvalidArgument("dictionary needs m >= 1".into()));
        }
        for (j, col) in data.chunks_mut(m).enumerate() {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "column {j} has norm {norm} and cannot be normalized"
                )));
            }
            col.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self { m, n, data })
    }

    /// Builds from row-major data (the CSV layout), normalizing columns.
    pub fn from_row_major(m: usize, n: usize, rows: &[f64]) -> Result<Self> {
        check_len("dictionary data", m * n, rows.len())?;
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                data[j * m + i] = rows[i * n + j];
            }
        }
        Self::from_col_major(m, n, data)
    }

    /// Strict mode: accepts the data as is but fails unless every column
    /// already has unit norm within `tol`.
    pub fn from_col_major_exact(m: usize, n: usize, data: Vec<f64>, tol: f64) -> Result<Self> {
        check_len("dictionary data", m * n, data.len())?;
        if m == 0 {
            return Err(Error::InvalidArgument("dictionary needs m >= 1".into()));
        }
        for (j, col) in data.chunks(m).enumerate() {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "column {j} has norm {norm}, expected 1 within {tol:e}"
                )));
            }
        }
        Ok(Self { m, n, data })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut rows = vec![0.0; self.m * self.n];
        for j in 0..self.n {
            for (i, v) in self.column(j).iter().enumerate() {
                rows[i * self.n + j] = *v;
            }
        }
        rows
    }

    /// `A x`; zero coordinates of `x` are skipped.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.matvec_into(x, &mut out);
        out
    }

    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (o, a) in out.iter_mut().zip(self.column(j)) {
                    *o += xj * a;
                }
            }
        }
    }

    /// `Aᵀ r`.
    pub fn rmatvec(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.rmatvec_into(r, &mut out);
        out
    }

    pub(crate) fn rmatvec_into(&self, r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(r.len(), self.m);
        for (j, o) in out.iter_mut().enumerate() {
            *o = dot(self.column(j), r);
        }
    }

    /// Sub-dictionary made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Dictionary {
        let mut data = Vec::with_capacity(self.m * cols.len());
        for &j in cols {
            data.extend_from_slice(self.column(j));
        }
        Dictionary {
            m: self.m,
            n: cols.len(),
            data,
        }
    }

    /// ‖A‖_F², equal to `n` for unit-norm columns.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Inner product with four independent accumulators so that the loop
/// vectorizes.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0; 4];
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// One SLOPE problem: `min_x ½‖y − Ax‖² + λ Σ_k w_k |x|_[k]`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    dict: Dictionary,
    y: Vec<f64>,
    lambda: f64,
    weights: Weights,
}

impl ProblemInstance {
    pub fn new(dict: Dictionary, y: Vec<f64>, lambda: f64, weights: Weights) -> Result<Self> {
        check_len("observation", dict.rows(), y.len())?;
        check_len("weights", dict.cols(), weights.len())?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { dict, y, lambda, weights })
    }

    /// Instance with `λ = ratio · λ_max`.
    pub fn with_lambda_ratio(dict: Dictionary, y: Vec<f64>, ratio: f64, weights: Weights) -> Result<Self> {
        let lmax = lambda_max(&dict, &y, &weights)?;
        if !(lmax > 0.0) {
            return Err(Error::InvalidArgument(
                "lambda_max is zero (observation orthogonal to every atom); use an absolute lambda".into(),
            ));
        }
        Self::new(dict, y, ratio * lmax, weights)
    }

    // Only reached through problem reduction, where n may drop to zero.
    pub(crate) fn from_parts_unchecked(dict: Dictionary, y: Vec<f64>, lambda: f64, weights: Weights) -> Self {
        Self { dict, y, lambda, weights }
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn m(&self) -> usize {
        self.dict.rows()
    }

    pub fn n(&self) -> usize {
        self.dict.cols()
    }

    pub fn lambda_max(&self) -> f64 {
        dual_norm_unchecked(&self.dict.rmatvec(&self.y), self.weights.as_slice())
    }

    /// Copy of this instance at another regularization level.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.dict.clone(), self.y.clone(), lambda, self.weights.clone())
    }

    /// P(x) = ½‖y − Ax‖² + λ Ω(x).
    pub fn primal_objective(&self, x: &[f64]) -> Result<f64> {
        check_len("primal iterate", self.n(), x.len())?;
        let r = self.residual(x);
        Ok(0.5 * norm_sq(&r) + self.lambda * slope_norm_unchecked(x, self.weights.as_slice()))
    }

    /// y − Ax.
    pub(crate) fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.dict.matvec(x);
        r.iter_mut().zip(&self.y).for_each(|(ri, yi)| *ri = yi - *ri);
        r
    }
}

/// λ_max = max_q Σ_{k≤q} |Aᵀy|_[k] / Σ_{k≤q} w_k: the smallest level at which
/// `x = 0` solves the problem.
pub fn lambda_max(dict: &Dictionary, y: &[f64], w: &Weights) -> Result<f64> {
    check_len("observation", dict.rows(), y.len())?;
    check_len("weights", dict.cols(), w.len())?;
    Ok(dual_norm_unchecked(&dict.rmatvec(y), w.as_slice()))
}

/// Feasible point of the dual problem, together with its correlations `Aᵀu`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    u: Vec<f64>,
    correlations: Vec<f64>,
}

impl DualPoint {
    /// Validates the cumulative constraints before accepting `u`.
    pub fn new_checked(dict: &Dictionary, u: Vec<f64>, lambda: f64, w: &Weights, tol: f64) -> Result<Self> {
        check_len("dual point", dict.rows(), u.len())?;
        check_len("weights", dict.cols(), w.len())?;
        let correlations = dict.rmatvec(&u);
        let excess = cumulative_excess(&correlations, w.as_slice(), lambda);
        if excess > tol {
            return Err(Error::InvalidArgument(format!(
                "dual point violates a cumulative constraint by {excess:e}"
            )));
        }
        Ok(Self { u, correlations })
    }

    pub fn zero(dict: &Dictionary) -> Self {
        Self {
            u: vec![0.0; dict.rows()],
            correlations: vec![0.0; dict.cols()],
        }
    }

    // Feasibility is the caller's responsibility (dual scaling guarantees it).
    pub(crate) fn from_parts(u: Vec<f64>, correlations: Vec<f64>) -> Self {
        Self { u, correlations }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// `Aᵀu` for the dictionary the point was built against.
    pub fn correlations(&self) -> &[f64] {
        &self.correlations
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.u
    }
}

/// True iff `Σ_{k≤q} |Aᵀu|_[k] ≤ λ Σ_{k≤q} w_k + tol` for every `q`.
pub fn is_dual_feasible(dict: &Dictionary, u: &[f64], lambda: f64, w: &Weights, tol: f64) -> bool {
    if u.len() != dict.rows() || w.len() != dict.cols() {
        return false;
    }
    cumulative_excess(&dict.rmatvec(u), w.as_slice(), lambda) <= tol
}

/// Primal value, dual value and duality gap of a feasible pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Objectives {
    pub primal: f64,
    pub dual: f64,
    /// Clamped at zero.
    pub gap: f64,
    /// Gap before clamping; negative only through roundoff.
    pub raw_gap: f64,
}

/// Evaluates P(x), D(u) = ½‖y‖² − ½‖y − u‖² and their gap.
///
/// The gap is accumulated as `½‖r − u‖² + λΩ(x) − ⟨Aᵀu, x⟩` with `r = y − Ax`,
/// an algebraically identical form of P(x) − D(u) whose terms all vanish at
/// the optimum, so it stays accurate far below the magnitude of P and D.
pub fn objectives(p: &ProblemInstance, x: &[f64], u: &DualPoint) -> Result<Objectives> {
    check_len("primal iterate", p.n(), x.len())?;
    check_len("dual point", p.m(), u.u().len())?;
    check_len("dual correlations", p.n(), u.correlations().len())?;
    let r = p.residual(x);
    let omega = slope_norm_unchecked(x, p.weights().as_slice());
    Ok(objectives_from_residual(p, x, &r, omega, u))
}

pub(crate) fn objectives_from_residual(p: &ProblemInstance, x: &[f64], residual: &[f64], omega: f64, u: &DualPoint) -> Objectives {
    let primal = 0.5 * norm_sq(residual) + p.lambda() * omega;
    let y_minus_u: f64 = p.y().iter().zip(u.u()).map(|(a, b)| (a - b) * (a - b)).sum();
    let dual = 0.5 * norm_sq(p.y()) - 0.5 * y_minus_u;
    let r_minus_u: f64 = residual.iter().zip(u.u()).map(|(a, b)| (a - b) * (a - b)).sum();
    let raw_gap = 0.5 * r_minus_u + p.lambda() * omega - dot(u.correlations(), x);
    Objectives {
        primal,
        dual,
        gap: raw_gap.max(0.0),
        raw_gap,
    }
}
