//! Python bindings for `pareto-records`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pareto_records::limit::{self, LimitConfig};
use pareto_records::rng::child_rng;
use pareto_records::stream::{self, ConditionalConfig, SimMethod, StreamModel};
use pareto_records::{analytics, Backend, EmpiricalLaw, Error, Point};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_model(model: &str) -> PyResult<StreamModel> {
    model.parse().map_err(to_py)
}

fn parse_method(method: &str) -> PyResult<SimMethod> {
    match method {
        "auto" => Ok(SimMethod::Auto),
        "direct" => Ok(SimMethod::Direct),
        "jump" => Ok(SimMethod::Jump),
        _ => Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    }
}

/// Current records of a stream of points in `d` dimensions.
#[pyclass(name = "Frontier")]
struct PyFrontier {
    inner: pareto_records::Frontier,
}

#[pymethods]
impl PyFrontier {
    /// `backend` is "auto", "scan" or "staircase" (d = 2 only).
    #[new]
    #[pyo3(signature = (d, backend = "auto"))]
    fn new(d: usize, backend: &str) -> PyResult<Self> {
        let inner = match backend {
            "auto" => pareto_records::Frontier::for_dim(d),
            "scan" => pareto_records::Frontier::new(d, Backend::GenericScan),
            "staircase" => pareto_records::Frontier::new(d, Backend::Staircase2D),
            _ => return Err(PyValueError::new_err(format!("unknown backend {backend:?}"))),
        }
        .map_err(to_py)?;
        Ok(PyFrontier { inner })
    }

    /// Number of current records killed by `point`, or None if it is not a
    /// record.
    fn insert(&mut self, point: Vec<f64>) -> PyResult<Option<usize>> {
        let p = Point::new(point).map_err(to_py)?;
        Ok(self.inner.insert(&p).map_err(to_py)?.kills())
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.sorted_points()
    }

    fn clear(&mut self) {
        self.inner.clear();
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Estimated pmf of a kill count.
#[pyclass(name = "Law", get_all)]
struct PyLaw {
    pmf: Vec<f64>,
    se: Vec<f64>,
    trials: u64,
    /// Limit laws only.
    tv_truncation_bound: Option<f64>,
}

#[pymethods]
impl PyLaw {
    fn __repr__(&self) -> String {
        let head: Vec<String> = self.pmf.iter().take(6).map(|p| format!("{p:.4}")).collect();
        format!(
            "Law(trials={}, pmf=[{}{}])",
            self.trials,
            head.join(", "),
            if self.pmf.len() > 6 { ", ..." } else { "" }
        )
    }
}

impl PyLaw {
    fn from_law(law: EmpiricalLaw, tv: Option<f64>) -> Self {
        PyLaw { pmf: law.pmf, se: law.se, trials: law.trials, tv_truncation_bound: tv }
    }
}

/// Totals of one stream.
#[pyclass(name = "StreamStats", get_all)]
struct PyStreamStats {
    n: u64,
    records_total: u64,
    remaining: u64,
    total_kills: u64,
    kill_histogram: BTreeMap<u64, u64>,
}

/// One draw of the truncated limit variable at a fixed Gumbel level.
#[pyclass(name = "LimitDraw", get_all)]
struct PyLimitDraw {
    k: u64,
    g: f64,
    delta: f64,
    maxima_depths: Vec<f64>,
    n_candidates: u64,
    n_maximal: u64,
    n_external: u64,
}

#[pymethods]
impl PyLimitDraw {
    /// Counts at smaller radii, read off this draw.
    fn readout(&self, deltas: Vec<f64>) -> PyResult<Vec<u64>> {
        let r = limit::LimitRealization {
            d: 0,
            g: self.g,
            delta: self.delta,
            maxima_depths: self.maxima_depths.clone(),
            n_candidates: self.n_candidates,
            n_maximal: self.n_maximal,
            n_external: self.n_external,
        };
        r.multi_delta_readout(&deltas).map_err(to_py)
    }
}

/// Indices of the points not strictly dominated by another.
#[pyfunction]
fn maxima_of(points: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
    let pts = points.into_iter().map(Point::new).collect::<Result<Vec<_>, _>>().map_err(to_py)?;
    pareto_records::maxima_of(&pts).map_err(to_py)
}

/// `a ≺ b`: every coordinate of `a` is strictly below `b`'s.
#[pyfunction]
fn strictly_dominates(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    pareto_records::geometry::strictly_dominates(&a, &b).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (d, n, model = "exp-max", seed = 0))]
fn run_stream(py: Python<'_>, d: usize, n: u64, model: &str, seed: u64) -> PyResult<PyStreamStats> {
    let model = parse_model(model)?;
    let s = py.detach(|| stream::run_stream(d, n, model, seed)).map_err(to_py)?;
    Ok(PyStreamStats {
        n: s.n,
        records_total: s.records_total,
        remaining: s.remaining,
        total_kills: s.total_kills(),
        kill_histogram: s.kill_histogram,
    })
}

/// Law of the kill count of records with index in `[n, ceil(n * window_factor)]`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (d, n, replicates = 1000, window_factor = 2.0, model = "exp-max", seed = 0, method = "auto"))]
fn conditional_law(
    py: Python<'_>,
    d: usize,
    n: u64,
    replicates: u64,
    window_factor: f64,
    model: &str,
    seed: u64,
    method: &str,
) -> PyResult<PyLaw> {
    let cfg = ConditionalConfig {
        d,
        n_target: n,
        window_factor,
        replicates,
        model: parse_model(model)?,
        seed,
        method: parse_method(method)?,
    };
    let est = py.detach(|| stream::estimate_conditional_law(&cfg)).map_err(to_py)?;
    Ok(PyLaw::from_law(est.law, None))
}

/// Law of the limit kill count truncated at ℓ1 radius `delta`.
#[pyfunction]
#[pyo3(signature = (d, samples, delta = None, seed = 0))]
fn limit_law(py: Python<'_>, d: usize, samples: u64, delta: Option<f64>, seed: u64) -> PyResult<PyLaw> {
    let cfg = LimitConfig::new(d, delta.unwrap_or_else(|| limit::default_delta(d)), seed, samples);
    let law = py.detach(|| limit::estimate_limit_law(&cfg)).map_err(to_py)?;
    let tv = limit::tv_truncation_bound(d, cfg.delta).map_err(to_py)?;
    Ok(PyLaw::from_law(law, Some(tv)))
}

#[pyfunction]
#[pyo3(signature = (d, g, delta, seed = 0))]
fn sample_limit(d: usize, g: f64, delta: f64, seed: u64) -> PyResult<PyLimitDraw> {
    let mut rng = child_rng(seed, 0);
    let r =
        limit::sample_k_g_truncated(d, g, delta, limit::DEFAULT_CANDIDATE_BUDGET, &mut rng).map_err(to_py)?;
    Ok(PyLimitDraw {
        k: r.k(),
        g: r.g,
        delta: r.delta,
        maxima_depths: r.maxima_depths,
        n_candidates: r.n_candidates,
        n_maximal: r.n_maximal,
        n_external: r.n_external,
    })
}

#[pyfunction]
fn tv_truncation_bound(d: usize, delta: f64) -> PyResult<f64> {
    limit::tv_truncation_bound(d, delta).map_err(to_py)
}

#[pyfunction]
fn d2_exact_pmf(k: u32) -> f64 {
    analytics::d2_exact_pmf(k)
}

#[pyfunction]
fn moment_upper_bound(d: u32, r: u32) -> PyResult<f64> {
    analytics::moment_upper_bound(d, r).map_err(to_py)
}

#[pyfunction]
fn brightwell_bound(d: u32, m: u32) -> PyResult<f64> {
    analytics::brightwell_bound(d, m).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "pareto_records")]
fn init_module(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<PyFrontier>()?;
    module.add_class::<PyLaw>()?;
    module.add_class::<PyStreamStats>()?;
    module.add_class::<PyLimitDraw>()?;
    module.add_function(wrap_pyfunction!(maxima_of, module)?)?;
    module.add_function(wrap_pyfunction!(strictly_dominates, module)?)?;
    module.add_function(wrap_pyfunction!(run_stream, module)?)?;
    module.add_function(wrap_pyfunction!(conditional_law, module)?)?;
    module.add_function(wrap_pyfunction!(limit_law, module)?)?;
    module.add_function(wrap_pyfunction!(sample_limit, module)?)?;
    module.add_function(wrap_pyfunction!(tv_truncation_bound, module)?)?;
    module.add_function(wrap_pyfunction!(d2_exact_pmf, module)?)?;
    module.add_function(wrap_pyfunction!(moment_upper_bound, module)?)?;
    module.add_function(wrap_pyfunction!(brightwell_bound, module)?)?;
    Ok(())
}
