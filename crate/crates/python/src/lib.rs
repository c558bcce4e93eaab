//! Python bindings. Matrices travel as lists of rows, vectors as lists.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use slope_screen::bench::{default_toeplitz_width, gen_dictionary_with_width, gen_observation, DictKind};
use slope_screen::{
    make_dual_point, objectives, screen as run_screen, screening_radius, solve_with_screening, sort_correlations, Dictionary, Error,
    ProblemInstance, ScalingVariant, ScreenParams, ScreenStrategy, SolveOptions, Strategy, Weights,
};

fn to_py_err(e: Error) -> PyErr {
    if e.is_numerical_guard() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Dictionary from a list of rows; columns are normalized to unit norm.
pub fn dictionary_from_rows(rows: &[Vec<f64>]) -> slope_screen::Result<Dictionary> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "row {bad} has {} entries, row 0 has {n}",
            rows[bad].len()
        )));
    }
    Dictionary::from_row_major(m, n, &rows.concat())
}

/// Problem instance from rows, observation, weights and either an absolute
/// `lambda` or a ratio of `λ_max`.
pub fn build_instance(
    rows: &[Vec<f64>],
    y: Vec<f64>,
    weights: Option<Vec<f64>>,
    oscar_w_last: f64,
    lambda: Option<f64>,
    lambda_ratio: f64,
) -> slope_screen::Result<ProblemInstance> {
    let dict = dictionary_from_rows(rows)?;
    let w = match weights {
        Some(w) => Weights::new(w)?,
        None => slope_screen::bench::oscar_weights(dict.cols(), oscar_w_last)?,
    };
    match lambda {
        Some(l) => ProblemInstance::new(dict, y, l, w),
        None => ProblemInstance::with_lambda_ratio(dict, y, lambda_ratio, w),
    }
}

fn parse_scaling(s: &str) -> PyResult<ScalingVariant> {
    match s {
        "full" => Ok(ScalingVariant::Full),
        "max" => Ok(ScalingVariant::Max),
        other => Err(PyValueError::new_err(format!(
            "unknown scaling {other:?}, expected 'full' or 'max'"
        ))),
    }
}

/// Random dictionary rows and observation for a seed.
#[pyfunction]
#[pyo3(signature = (kind="gaussian", m=100, n=300, seed=0, toeplitz_width=None))]
fn generate(kind: &str, m: usize, n: usize, seed: u64, toeplitz_width: Option<f64>) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let kind: DictKind = kind.parse().map_err(to_py_err)?;
    let width = toeplitz_width.unwrap_or_else(|| default_toeplitz_width(m));
    let dict = gen_dictionary_with_width(kind, m, n, seed, width).map_err(to_py_err)?;
    let y = gen_observation(m, seed).map_err(to_py_err)?;
    let rows = dict.to_row_major().chunks(n.max(1)).map(<[f64]>::to_vec).collect();
    Ok((rows, y))
}

/// OSCAR weights decreasing linearly from 1 to `w_last`.
#[pyfunction]
fn oscar_weights(n: usize, w_last: f64) -> PyResult<Vec<f64>> {
    Ok(slope_screen::bench::oscar_weights(n, w_last)
        .map_err(to_py_err)?
        .as_slice()
        .to_vec())
}

#[pyfunction]
fn slope_norm(x: Vec<f64>, weights: Vec<f64>) -> PyResult<f64> {
    let w = Weights::new(weights).map_err(to_py_err)?;
    slope_screen::slope_norm(&x, &w).map_err(to_py_err)
}

/// Proximal operator of `t · lam · Ω`.
#[pyfunction]
fn prox(z: Vec<f64>, t: f64, lam: f64, weights: Vec<f64>) -> PyResult<Vec<f64>> {
    let w = Weights::new(weights).map_err(to_py_err)?;
    slope_screen::prox_sorted_l1(&z, t, lam, &w).map_err(to_py_err)
}

/// Smallest λ for which zero solves the problem.
#[pyfunction]
fn lambda_max(a: Vec<Vec<f64>>, y: Vec<f64>, weights: Vec<f64>) -> PyResult<f64> {
    let dict = dictionary_from_rows(&a).map_err(to_py_err)?;
    let w = Weights::new(weights).map_err(to_py_err)?;
    slope_screen::lambda_max(&dict, &y, &w).map_err(to_py_err)
}

/// Solves one instance; returns a dict with `x`, `gap`, `iterations`,
/// `exit`, `screened`, `lambda` and `wall_time_s`.
#[pyfunction]
#[pyo3(signature = (
    a, y, *, weights=None, oscar_w_last=0.1, lam=None, lambda_ratio=0.5, gap_tol=1e-10, max_iters=1_000_000,
    time_budget=None, screen="none", screen_every=20, scaling="full"
))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    a: Vec<Vec<f64>>,
    y: Vec<f64>,
    weights: Option<Vec<f64>>,
    oscar_w_last: f64,
    lam: Option<f64>,
    lambda_ratio: f64,
    gap_tol: f64,
    max_iters: usize,
    time_budget: Option<f64>,
    screen: &str,
    screen_every: usize,
    scaling: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let p = build_instance(&a, y, weights, oscar_w_last, lam, lambda_ratio).map_err(to_py_err)?;
    let opts = SolveOptions {
        gap_tol,
        max_iters,
        time_budget,
        screen_strategy: screen.parse::<ScreenStrategy>().map_err(to_py_err)?,
        screen_every,
        scaling_variant: parse_scaling(scaling)?,
        ..SolveOptions::default()
    };
    let r = py.detach(|| solve_with_screening(&p, &opts)).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("x", r.x)?;
    out.set_item("gap", r.gap)?;
    out.set_item("iterations", r.iterations)?;
    out.set_item("exit", format!("{:?}", r.exit).to_lowercase())?;
    out.set_item("screened", r.screened)?;
    out.set_item("lambda", p.lambda())?;
    out.set_item("wall_time_s", r.wall_time_s)?;
    Ok(out)
}

/// One screening test on the GAP sphere built from iterate `x`; returns a
/// dict with `screened`, `radius`, `gap` and `thresholds_visited`.
#[pyfunction]
#[pyo3(signature = (
    a, y, x, *, strategy="all", r0=0.0, weights=None, oscar_w_last=0.1, lam=None, lambda_ratio=0.5, scaling="full"
))]
#[allow(clippy::too_many_arguments)]
fn screen<'py>(
    py: Python<'py>,
    a: Vec<Vec<f64>>,
    y: Vec<f64>,
    x: Vec<f64>,
    strategy: &str,
    r0: f64,
    weights: Option<Vec<f64>>,
    oscar_w_last: f64,
    lam: Option<f64>,
    lambda_ratio: f64,
    scaling: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let p = build_instance(&a, y, weights, oscar_w_last, lam, lambda_ratio).map_err(to_py_err)?;
    let strategy: Strategy = strategy.parse().map_err(to_py_err)?;
    if !(r0 >= 0.0) {
        return Err(PyValueError::new_err(format!("r0 must be nonnegative, got {r0}")));
    }
    let u = make_dual_point(&p, &x, parse_scaling(scaling)?).map_err(to_py_err)?;
    let obj = objectives(&p, &x, &u).map_err(to_py_err)?;
    let radius = screening_radius(&obj, r0);
    let sc = sort_correlations(p.dict(), u.u()).map_err(to_py_err)?;
    let outcome = run_screen(&sc, p.weights(), ScreenParams::new(p.lambda(), radius), strategy).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("screened", outcome.screened)?;
    out.set_item("radius", radius)?;
    out.set_item("gap", obj.gap)?;
    out.set_item("thresholds_visited", outcome.thresholds_visited)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "slope_screen")]
pub fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(oscar_weights, m)?)?;
    m.add_function(wrap_pyfunction!(slope_norm, m)?)?;
    m.add_function(wrap_pyfunction!(prox, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_max, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(screen, m)?)?;
    Ok(())
}
