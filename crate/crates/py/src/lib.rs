//! Python bindings. States are plain lists of floats, thermal contexts JSON
//! strings in the CLI's format, and structured results come back as dicts.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use catlab::experiments::{self, Experiment, SweepConfig};
use catlab::{catalysis, convex_split, entropy, majorization};
use catlab::{AlphaGrid, Error, ProbVec, ThermalContext};

create_exception!(
    catlab_py,
    ResourceLimitError,
    pyo3::exceptions::PyMemoryError
);

fn py_err(e: Error) -> PyErr {
    if e.is_resource_limit() {
        ResourceLimitError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn state(x: Vec<f64>) -> PyResult<ProbVec> {
    ProbVec::new(x).map_err(py_err)
}

fn context(ctx: Option<&str>, dim: usize) -> PyResult<ThermalContext> {
    match ctx {
        None => Ok(ThermalContext::degenerate(dim)),
        Some(s) => s.parse().map_err(py_err),
    }
}

/// Serializable value to a Python object via the `json` module.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyfunction]
fn majorizes(p: Vec<f64>, q: Vec<f64>) -> PyResult<bool> {
    Ok(majorization::majorizes(&state(p)?, &state(q)?))
}

#[pyfunction]
fn majorization_margin(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    Ok(majorization::majorization_margin(&state(p)?, &state(q)?))
}

#[pyfunction]
#[pyo3(signature = (p, q, ctx=None))]
fn thermo_majorizes(p: Vec<f64>, q: Vec<f64>, ctx: Option<&str>) -> PyResult<bool> {
    let ctx = context(ctx, p.len())?;
    majorization::thermo_majorizes(&state(p)?, &state(q)?, &ctx).map_err(py_err)
}

#[pyfunction]
fn flattest_state(q: Vec<f64>, eps: f64) -> PyResult<Vec<f64>> {
    Ok(majorization::flattest_state(&state(q)?, eps)
        .map_err(py_err)?
        .into_entries())
}

#[pyfunction]
#[pyo3(signature = (p, q, c, eps, ctx=None))]
fn eps_catalytic_step(
    p: Vec<f64>,
    q: Vec<f64>,
    c: Vec<f64>,
    eps: f64,
    ctx: Option<&str>,
) -> PyResult<bool> {
    let ctx = context(ctx, p.len())?;
    majorization::eps_catalytic_step(&state(p)?, &state(q)?, &state(c)?, eps, &ctx).map_err(py_err)
}

#[pyfunction]
fn renyi_divergence(p: Vec<f64>, q: Vec<f64>, alpha: f64) -> PyResult<f64> {
    entropy::renyi_divergence(&state(p)?, &state(q)?, alpha).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (p, q, ctx=None, alpha_grid="default"))]
fn second_laws<'py>(
    py: Python<'py>,
    p: Vec<f64>,
    q: Vec<f64>,
    ctx: Option<&str>,
    alpha_grid: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let ctx = context(ctx, p.len())?;
    let grid: AlphaGrid = alpha_grid.parse().map_err(py_err)?;
    let laws = catalysis::second_laws(&state(p)?, &state(q)?, &ctx, &grid).map_err(py_err)?;
    to_py(py, &laws)
}

#[pyfunction]
#[pyo3(signature = (p, q, ctx=None, k_max=catalysis::DEFAULT_K_MAX))]
fn min_k_copy(p: Vec<f64>, q: Vec<f64>, ctx: Option<&str>, k_max: u32) -> PyResult<Option<u32>> {
    let ctx = context(ctx, p.len())?;
    catalysis::min_k_copy(&state(p)?, &state(q)?, &ctx, k_max).map_err(py_err)
}

#[pyfunction]
fn embezzlement_bound(d_s: u64, d_c: u64) -> f64 {
    catalysis::embezzlement_bound(d_s, d_c)
}

#[pyfunction]
fn convex_split_check<'py>(
    py: Python<'py>,
    rho: Vec<f64>,
    sigma: Vec<f64>,
    m: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let check =
        convex_split::verify_convex_split(&state(rho)?, &state(sigma)?, m).map_err(py_err)?;
    to_py(py, &check)
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    experiments::preset_names().to_vec()
}

#[pyfunction]
fn preset_config<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = experiments::preset(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))?;
    to_py(py, &p.config)
}

/// Runs `experiment` (`"fig2"` … `"fig6"`) with a JSON sweep configuration and
/// returns the run summary. The GIL is released while the sweep runs.
#[pyfunction]
fn run_experiment<'py>(
    py: Python<'py>,
    experiment: &str,
    config: &str,
    out_dir: PathBuf,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let which: Experiment = experiment.parse().map_err(py_err)?;
    let mut cfg = SweepConfig::from_json(config).map_err(py_err)?;
    cfg.seed = seed;
    let summary = py
        .detach(|| experiments::run_experiment(&cfg, which, &out_dir))
        .map_err(py_err)?;
    to_py(py, &summary)
}

#[pymodule]
fn catlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add(
        "ResourceLimitError",
        m.py().get_type::<ResourceLimitError>(),
    )?;
    m.add("__version__", catlab::VERSION)?;
    m.add_function(wrap_pyfunction!(majorizes, m)?)?;
    m.add_function(wrap_pyfunction!(majorization_margin, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_majorizes, m)?)?;
    m.add_function(wrap_pyfunction!(flattest_state, m)?)?;
    m.add_function(wrap_pyfunction!(eps_catalytic_step, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(second_laws, m)?)?;
    m.add_function(wrap_pyfunction!(min_k_copy, m)?)?;
    m.add_function(wrap_pyfunction!(embezzlement_bound, m)?)?;
    m.add_function(wrap_pyfunction!(convex_split_check, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
