//! Python bindings for etaforge.

use ::etaforge as core;
use core::asymptotics::{named_function, regint_rp, RegintConfig};
use core::cli;
use core::partrace::{named_kernel, tr_param as core_tr_param, Kernel, SpectralFamily, SpectralModel, TraceConfig};
use core::quadrature::RadiusLadder;
use core::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(etaforge, NumericError, PyRuntimeError, "A numerical routine failed.");

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::InvalidInput(_) | core::Error::DimensionMismatch { .. } | core::Error::OrderViolation(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => NumericError::new_err(other.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn to_rows(m: &core::CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn ladder(r: Option<(f64, f64, usize)>, fallback: RadiusLadder) -> PyResult<RadiusLadder> {
    let l = r.map_or(fallback, |(a, b, n)| RadiusLadder::new(a, b, n));
    l.validate().map_err(err)?;
    Ok(l)
}

/// Complex Clifford representation on `ℂ^(2^(k-1))` with `2k - 1` generators.
#[pyclass(name = "CliffordRep", frozen)]
struct PyCliffordRep(core::clifford::CliffordRep);

#[pymethods]
impl PyCliffordRep {
    #[new]
    fn new(k: usize) -> PyResult<Self> {
        core::clifford::CliffordRep::standard(k).map(Self).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k
    }

    #[getter]
    fn p(&self) -> usize {
        self.0.p
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank
    }

    fn generators(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.0.generators.iter().map(to_rows).collect()
    }

    /// `c(x) = Σ x_i c_i`.
    fn action(&self, x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.0.action(&x).map(|m| to_rows(&m)).map_err(err)
    }

    fn volume_trace(&self) -> Complex64 {
        self.0.volume_trace()
    }

    fn defects<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = self.0.defects();
        let out = PyDict::new(py);
        out.set_item("skew_adjoint", d.skew_adjoint)?;
        out.set_item("anticommutation", d.anticommutation)?;
        out.set_item("volume_element", d.volume_element)?;
        out.set_item("volume_trace", d.volume_trace)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("CliffordRep(k={}, rank={})", self.0.k, self.0.rank)
    }
}

/// Asymptotic model: power terms and the remainder degree.
#[pyclass(name = "ExpansionModel", frozen, from_py_object)]
#[derive(Clone)]
struct PyExpansionModel(core::asymptotics::ExpansionModel);

#[pymethods]
impl PyExpansionModel {
    #[new]
    fn new(degrees: Vec<f64>, remainder: f64) -> PyResult<Self> {
        core::asymptotics::ExpansionModel::powers(&degrees, remainder).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::asymptotics::ExpansionModel::from_json(text).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ExpansionModel({})", serde_json::to_string(&self.0).unwrap_or_default())
    }
}

/// A named matrix family such as `moebius`, `affine_clifford(1)` or `unit_clifford(2)`.
#[pyclass(name = "Family", frozen)]
struct PyFamily {
    id: String,
    inner: core::forms::MatrixFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        let inner = core::forms::named_family(id).map_err(err)?;
        Ok(Self { id: id.to_string(), inner })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.inner.eval(&x).map(|m| to_rows(&m)).map_err(err)
    }

    /// `x ↦ A(Ox)` for an orthogonal `O` given by rows.
    fn rotated(&self, o: Vec<Vec<f64>>) -> PyResult<Self> {
        let p = self.inner.p;
        if o.len() != p || o.iter().any(|r| r.len() != p) {
            return Err(PyValueError::new_err(format!("rotation must be {p}×{p}")));
        }
        let m = nalgebra::DMatrix::from_fn(p, p, |i, j| o[i][j]);
        let inner = self.inner.rotated(&m).map_err(err)?;
        Ok(Self { id: format!("{}∘O", self.id), inner })
    }

    /// Top-degree coefficient of `tr (A⁻¹dA)^(2k-1)` at `x`.
    fn trace_density(&self, x: Vec<f64>) -> PyResult<Complex64> {
        core::forms::trace_density(&self.inner, &x).map_err(err)
    }

    /// Higher eta invariant `η_k` of the family.
    #[pyo3(signature = (k, model, ladder=None, radial_nodes=None))]
    fn eta(
        &self,
        py: Python<'_>,
        k: usize,
        model: &PyExpansionModel,
        ladder: Option<(f64, f64, usize)>,
        radial_nodes: Option<usize>,
    ) -> PyResult<(Complex64, f64)> {
        let mut cfg = RegintConfig::default().with_ladder(self::ladder(ladder, RadiusLadder::new(16.0, 65536.0, 24))?);
        if let Some(n) = radial_nodes {
            cfg.radial_nodes = n;
        }
        let r = py
            .detach(|| core::eta::eta_k(&self.inner, k, &model.0, &cfg))
            .map_err(err)?;
        Ok((r.value, r.error_estimate))
    }

    fn __repr__(&self) -> String {
        format!("Family({:?}, p={}, rank={})", self.id, self.inner.p, self.inner.rank)
    }
}

/// Regularized integral of a named function over `ℝ^p`.
#[pyfunction]
#[pyo3(signature = (function, p, model=None, ladder=None))]
fn regint(
    py: Python<'_>,
    function: &str,
    p: usize,
    model: Option<PyExpansionModel>,
    ladder: Option<(f64, f64, usize)>,
) -> PyResult<(Complex64, i32)> {
    let nf = named_function(function, p).map_err(err)?;
    let model = model.map_or_else(|| nf.model.clone(), |m| m.0);
    let cfg = RegintConfig::default().with_ladder(self::ladder(ladder, nf.ladder)?);
    let f = |x: &[f64]| (nf.f)(x);
    let rv = py.detach(|| regint_rp(&f, nf.p, &model, &cfg)).map_err(err)?;
    Ok((rv.value, rv.ambiguity_degree))
}

/// Parametric trace of a named kernel over the circle operator with spectrum `ℤ + a`.
#[pyfunction]
fn tr_param(a: f64, kernel: &str, order: f64, mu: Vec<f64>) -> PyResult<(Complex64, i32)> {
    let k = named_kernel(kernel, mu.len()).map_err(err)?;
    let fam = SpectralFamily::new(SpectralModel::circle(a).map_err(err)?, Kernel::Expr(k), order).map_err(err)?;
    let tv = core_tr_param(&fam, &mu, &TraceConfig::default()).map_err(err)?;
    Ok((tv.value, tv.ambiguity_degree))
}

/// Runs one experiment config (JSON text or dict) and returns the report.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let text: String = match config.extract::<String>() {
        Ok(s) => s,
        Err(_) => py.import("json")?.call_method1("dumps", (config,))?.extract()?,
    };
    let cfg = cli::ExperimentConfig::from_json(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    cfg.budget.validate().map_err(PyValueError::new_err)?;
    let result = py.detach(|| cli::run(&cfg));
    json_to_py(py, &cli::result_json(&result))
}

/// Canonical hash of an experiment config.
#[pyfunction]
fn config_hash(config: &str) -> PyResult<String> {
    cli::ExperimentConfig::from_json(config)
        .map(|c| c.hash())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Registered experiments as `(id, tags, acceptance, summary)`.
#[pyfunction]
fn experiments() -> Vec<(&'static str, Vec<&'static str>, bool, &'static str)> {
    cli::REGISTRY
        .iter()
        .map(|e| (e.id, e.tags.to_vec(), e.acceptance, e.summary))
        .collect()
}

#[pymodule]
fn etaforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    m.add_class::<PyCliffordRep>()?;
    m.add_class::<PyExpansionModel>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(regint, m)?)?;
    m.add_function(wrap_pyfunction!(tr_param, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(config_hash, m)?)?;
    m.add_function(wrap_pyfunction!(experiments, m)?)?;
    Ok(())
}
