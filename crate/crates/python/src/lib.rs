//! Python module `apfourier`. Reports come back as plain dicts with the same
//! camelCase keys as the JSON output of the command-line tool.

use apfourier_core as core;
use apfourier_core::{DiscreteSet, Error, FejerParams, FejerVariant, Method, VerifyOptions};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn method(name: &str) -> PyResult<Method> {
    match name {
        "direct" => Ok(Method::Direct),
        "spectral" => Ok(Method::Spectral),
        "both" => Ok(Method::Both),
        other => Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    }
}

/// A subset of `[0, N)`.
#[pyclass(name = "DiscreteSet", module = "apfourier", frozen, skip_from_py_object)]
struct PySet {
    inner: DiscreteSet,
}

#[pymethods]
impl PySet {
    #[new]
    fn new(ambient: usize, elements: Vec<usize>) -> PyResult<Self> {
        DiscreteSet::from_unsorted(ambient, elements)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// Reads a text or JSON set file.
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        core::io::read_set(path).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    #[getter]
    fn elements(&self) -> Vec<usize> {
        self.inner.elements().to_vec()
    }

    fn oddified(&self) -> Self {
        Self { inner: self.inner.oddified() }
    }

    fn to_text(&self) -> String {
        core::io::format_set_text(&self.inner, &[])
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, value: usize) -> bool {
        self.inner.contains(value)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("DiscreteSet(ambient={}, len={})", self.inner.ambient(), self.inner.len())
    }
}

#[pyfunction]
fn cantor_build(depth: u32) -> PyResult<PySet> {
    core::cantor_build(depth).map(|inner| PySet { inner }).map_err(py_err)
}

#[pyfunction]
fn fractional_density_fit<'py>(py: Python<'py>, set: &PySet) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core::fractional_density_fit(&set.inner).map_err(py_err)?)
}

/// `1/N`-normalized indicator coefficients, index `k = 0..N`.
#[pyfunction]
fn dft_indicator(set: &PySet) -> Vec<Complex64> {
    core::dft_indicator(&set.inner).into_coeffs()
}

#[pyfunction]
#[pyo3(signature = (set, method = "both"))]
fn count_aps<'py>(py: Python<'py>, set: &PySet, method: &str) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core::count_aps(&set.inner, self::method(method)?).map_err(py_err)?)
}

#[pyfunction]
fn genuine_ap_count(set: &PySet) -> u64 {
    core::genuine_ap_count(&set.inner)
}

#[pyfunction]
#[pyo3(signature = (set, method = "direct"))]
fn congruence_count(set: &PySet, method: &str) -> PyResult<u64> {
    core::congruence_count(&set.inner, self::method(method)?).map_err(py_err)
}

/// `Λ₃(1_A, 1_A, 1_A)`.
#[pyfunction]
#[pyo3(signature = (set, method = "spectral"))]
fn lambda3(set: &PySet, method: &str) -> PyResult<Complex64> {
    let f: Vec<Complex64> = set.inner.indicator().into_iter().map(Complex64::from).collect();
    core::lambda3(&f, &f, &f, self::method(method)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (set, alpha = None, epsilon = core::apcount::DEFAULT_EPSILON))]
fn uniformity_guarantee<'py>(
    py: Python<'py>,
    set: &PySet,
    alpha: Option<f64>,
    epsilon: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let params = match alpha {
        Some(a) => core::UniformityParams::with_alpha(&set.inner, a, epsilon),
        None => core::UniformityParams::from_set(&set.inner, epsilon),
    }
    .map_err(py_err)?;
    report(py, &core::uniformity_guarantee(&set.inner, &params).map_err(py_err)?)
}

#[pyfunction]
fn smearing_diagnostic<'py>(py: Python<'py>, set: &PySet) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core::smearing_diagnostic(&set.inner))
}

/// Full decay, decomposition and counting pipeline on an odd ambient.
#[pyfunction]
#[pyo3(signature = (set, fejer_k = None, beta = None, epsilon = core::apcount::DEFAULT_EPSILON, symmetric_fejer = false))]
fn theorem41_verify<'py>(
    py: Python<'py>,
    set: &PySet,
    fejer_k: Option<usize>,
    beta: Option<f64>,
    epsilon: f64,
    symmetric_fejer: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let fejer = match fejer_k {
        Some(k) => FejerParams::new(k),
        None => FejerParams::auto(set.inner.ambient()),
    }
    .map_err(py_err)?;
    let opts = VerifyOptions {
        variant: if symmetric_fejer { FejerVariant::Symmetric } else { FejerVariant::OneSided },
        epsilon,
    };
    report(py, &core::theorem41_verify(&set.inner, fejer, beta, opts).map_err(py_err)?)
}

/// Randomized multiscale build. Returns the final set and the trace summary.
#[pyfunction]
#[pyo3(signature = (branching, keep, depth, seed = 0, verify_blocks = false, eta = None, max_retries = 64))]
#[allow(clippy::too_many_arguments)]
fn construct_salem<'py>(
    py: Python<'py>,
    branching: usize,
    keep: usize,
    depth: u32,
    seed: u64,
    verify_blocks: bool,
    eta: Option<f64>,
    max_retries: u32,
) -> PyResult<(PySet, Bound<'py, PyAny>)> {
    let config = core::SalemConfig {
        verify_blocks,
        eta_override: eta,
        max_retries,
        ..core::SalemConfig::new(branching, keep, depth, seed)
    };
    let trace = core::construct(&config).map_err(py_err)?;
    let set = trace.final_set().map_err(py_err)?.clone();
    let doc = trace.document().map_err(py_err)?;
    Ok((PySet { inner: set }, report(py, &doc)?))
}

#[pymodule]
fn apfourier(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_function(wrap_pyfunction!(cantor_build, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_density_fit, m)?)?;
    m.add_function(wrap_pyfunction!(dft_indicator, m)?)?;
    m.add_function(wrap_pyfunction!(count_aps, m)?)?;
    m.add_function(wrap_pyfunction!(genuine_ap_count, m)?)?;
    m.add_function(wrap_pyfunction!(congruence_count, m)?)?;
    m.add_function(wrap_pyfunction!(lambda3, m)?)?;
    m.add_function(wrap_pyfunction!(uniformity_guarantee, m)?)?;
    m.add_function(wrap_pyfunction!(smearing_diagnostic, m)?)?;
    m.add_function(wrap_pyfunction!(theorem41_verify, m)?)?;
    m.add_function(wrap_pyfunction!(construct_salem, m)?)?;
    Ok(())
}
