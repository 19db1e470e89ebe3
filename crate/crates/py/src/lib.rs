//! Python bindings. Reports come back as plain dicts and lists.

use bandlab::fredholmlab::{self, LadderConfig};
use bandlab::gallery::{self, GalleryTolerances};
use bandlab::moduli::{self, SweepConfig};
use bandlab::{limitops, BandOperator, Error, MultiIndex, NormTag, PNorm};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExhausted(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn norm(p: &str) -> PyResult<NormTag> {
    p.parse::<PNorm>().map(NormTag::new).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Serializable report to Python objects through the json module.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A band operator on l^p(Z^N, C^d).
#[pyclass(name = "Operator", module = "bandlab", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyOperator {
    pub inner: BandOperator,
}

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        BandOperator::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    /// Scalar Laurent operator on Z from (offset, coefficient) pairs.
    #[staticmethod]
    fn laurent(coeffs: Vec<(i64, Complex64)>) -> PyResult<Self> {
        BandOperator::scalar_laurent(&coeffs).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn identity(dim: usize, fiber: usize) -> PyResult<Self> {
        BandOperator::identity(dim, fiber).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn shift(offset: Vec<i64>, fiber: usize) -> PyResult<Self> {
        let k = MultiIndex::new(&offset).map_err(err)?;
        BandOperator::shift(k, fiber).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn gallery(name: &str) -> PyResult<Self> {
        let case = gallery::build_example(name).map_err(err)?;
        case.operator()
            .cloned()
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("gallery case `{name}` is not a band operator")))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn fiber(&self) -> usize {
        self.inner.fiber()
    }

    #[getter]
    fn bandwidth(&self) -> usize {
        self.inner.bandwidth()
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.inner.tail_bound()
    }

    fn with_tail_bound(&self, tail: f64) -> PyResult<Self> {
        self.inner.clone().with_tail_bound(tail).map(|inner| Self { inner }).map_err(err)
    }

    fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.inner.add(&other.inner).map(|inner| Self { inner }).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.inner.sub(&other.inner).map(|inner| Self { inner }).map_err(err)
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.inner.compose(&other.inner).map(|inner| Self { inner }).map_err(err)
    }

    fn __mul__(&self, z: Complex64) -> Self {
        Self { inner: self.inner.scale(z) }
    }

    fn __rmul__(&self, z: Complex64) -> Self {
        self.__mul__(z)
    }

    /// Matrix of P_n A P_n as a list of rows.
    fn finite_section(&self, radius: usize) -> Vec<Vec<Complex64>> {
        let m = self.inner.finite_section(radius, NormTag::new(PNorm::Two)).matrix;
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner.semantic_eq(&other.inner, 0.0)
    }

    fn __repr__(&self) -> String {
        format!("Operator(N={}, d={}, bandwidth={})", self.inner.dim(), self.inner.fiber(), self.inner.bandwidth())
    }
}

#[pyfunction(name = "moduli")]
#[pyo3(signature = (op, radii, m = 5, p = "2", stab_tol = 0.05))]
fn moduli_dict<'py>(py: Python<'py>, op: &PyOperator, radii: Vec<usize>, m: usize, p: &str, stab_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = moduli::moduli_report(&op.inner, &radii, m, norm(p)?, stab_tol).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn moduli_csv(op: &PyOperator, radii: Vec<usize>, m: usize) -> PyResult<String> {
    let r = moduli::moduli_report(&op.inner, &radii, m, NormTag::new(PNorm::Two), 0.05).map_err(err)?;
    Ok(r.to_csv())
}

#[pyfunction]
fn spectrum<'py>(py: Python<'py>, op: &PyOperator) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &limitops::operator_spectrum(&op.inner).map_err(err)?)
}

#[pyfunction]
fn limit_operator(op: &PyOperator, direction: &str) -> PyResult<PyOperator> {
    let dir = match direction {
        "+" | "plus" => limitops::Direction::plus(),
        "-" | "minus" => limitops::Direction::minus(),
        other => return Err(PyValueError::new_err(format!("direction `{other}`: expected `+` or `-`"))),
    };
    limitops::limit_operator(&op.inner, &dir).map(|inner| PyOperator { inner }).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (op, tol = fredholmlab::SYMBOL_TOL))]
fn symbol<'py>(py: Python<'py>, op: &PyOperator, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &fredholmlab::symbol_invertibility(&op.inner, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (op, radii = None, zero_tol = None))]
fn ladder<'py>(py: Python<'py>, op: &PyOperator, radii: Option<Vec<usize>>, zero_tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = LadderConfig::for_dim(op.inner.dim());
    if let Some(r) = radii {
        cfg.sweep_radii = r;
    }
    if let Some(t) = zero_tol {
        cfg.sweep.zero_tol = t;
    }
    let lad = py.detach(|| fredholmlab::check_conditions(&op.inner, &cfg)).map_err(err)?;
    to_py(py, &lad)
}

#[pyfunction]
#[pyo3(signature = (op, radii = None))]
fn sweep<'py>(py: Python<'py>, op: &PyOperator, radii: Option<Vec<usize>>) -> PyResult<Bound<'py, PyAny>> {
    let radii = radii.unwrap_or_else(|| gallery::default_radii(op.inner.dim()));
    let v = py.detach(|| moduli::truncation_sweep_classify(&op.inner, &radii, SweepConfig::default())).map_err(err)?;
    to_py(py, &v)
}

/// Trace of the semi-Fredholm argument; `eps=None` uses the estimate of s^l_m(A).
#[pyfunction]
#[pyo3(signature = (op, m, eps = None, n = 40))]
fn tsemi<'py>(py: Python<'py>, op: &PyOperator, m: usize, eps: Option<f64>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let t = py.detach(|| fredholmlab::tsemi_trace(&op.inner, m, eps, n, NormTag::new(PNorm::Two))).map_err(err)?;
    to_py(py, &t)
}

#[pyfunction]
fn index_identity<'py>(py: Python<'py>, fiber: usize, n: usize, l: usize, m: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &fredholmlab::index_identity(fiber, n, l, m).map_err(err)?)
}

#[pyfunction]
fn gallery_cases() -> Vec<&'static str> {
    gallery::CASE_NAMES.to_vec()
}

#[pyfunction(name = "gallery")]
#[pyo3(signature = (cases = None))]
fn run_gallery<'py>(py: Python<'py>, cases: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    let tol = GalleryTolerances::default();
    let report = py
        .detach(|| match &cases {
            Some(c) => gallery::run_cases(&c.iter().map(String::as_str).collect::<Vec<_>>(), &tol),
            None => gallery::run_gallery(&tol),
        })
        .map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "bandlab")]
fn bandlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(moduli_dict, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_csv, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(limit_operator, m)?)?;
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(ladder, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(tsemi, m)?)?;
    m.add_function(wrap_pyfunction!(index_identity, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_cases, m)?)?;
    m.add_function(wrap_pyfunction!(run_gallery, m)?)?;
    Ok(())
}
