//! Python bindings for `fmw-core`.

use fmw_core::beta::BetaContext;
use fmw_core::checks::{self, RunConfig};
use fmw_core::collar;
use fmw_core::fm::{self, Region, DEFAULT_RHO0};
use fmw_core::group::{GroupElement, Permutation};
use fmw_core::json;
use fmw_core::tree::{enumerate_trees, NestedTree};
use fmw_core::w;
use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: fmw_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_region(name: &str) -> PyResult<Region> {
    match name {
        "interior" => Ok(Region::Interior),
        "collar" => Ok(Region::Collar),
        "boundary" => Ok(Region::Boundary),
        "mixed" => Ok(Region::Mixed),
        _ => Err(PyValueError::new_err(format!("unknown region {name:?}"))),
    }
}

fn group_element(perm: Vec<usize>, q: Vec<Vec<f64>>) -> PyResult<GroupElement> {
    let n = q.len();
    if q.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("q must be a square matrix"));
    }
    let q = DMatrix::from_row_iterator(n, n, q.into_iter().flatten());
    GroupElement::new(Permutation::from_images(perm).map_err(err)?, q).map_err(err)
}

/// A point of the Fulton–MacPherson space `F(k)` in normal form.
#[pyclass(name = "FmPoint", module = "fmw", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFmPoint(fm::FmPoint);

#[pymethods]
impl PyFmPoint {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        json::fm_from_json(s).map(PyFmPoint).map_err(err)
    }

    fn to_json(&self) -> String {
        json::fm_to_json(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn rho0(&self) -> f64 {
        self.0.rho0()
    }

    /// Canonical nested tree, e.g. `"[[1,2],3]"`.
    #[getter]
    fn tree(&self) -> String {
        self.0.tree().to_string()
    }

    #[getter]
    fn edge_u(&self) -> Vec<f64> {
        self.0.edge_u()
    }

    fn is_boundary(&self) -> bool {
        self.0.is_boundary()
    }

    /// Acts by `(σ, Q)` with `σ` given by its images `[σ(1), …, σ(k)]`.
    fn act(&self, perm: Vec<usize>, q: Vec<Vec<f64>>) -> PyResult<Self> {
        let g = group_element(perm, q)?;
        self.0.act(&g).map(PyFmPoint).map_err(err)
    }

    /// The represented configuration of `k` points, normalized; fails on
    /// boundary points.
    fn realize(&self) -> PyResult<Vec<Vec<f64>>> {
        let x = self.0.realize().map_err(err)?;
        Ok(x.points().iter().map(|p| p.iter().copied().collect()).collect())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("FmPoint(n={}, k={}, tree={})", self.0.dim(), self.0.arity(), self.0.tree())
    }
}

/// A point of the W-construction `WF(k)`.
#[pyclass(name = "WPoint", module = "fmw", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWPoint(w::WPoint);

#[pymethods]
impl PyWPoint {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        json::w_from_json(s).map(PyWPoint).map_err(err)
    }

    /// Single-vertex point labelled by `p`.
    #[staticmethod]
    fn single(p: &PyFmPoint) -> Self {
        PyWPoint(w::WPoint::single(p.0.clone()))
    }

    fn to_json(&self) -> String {
        json::w_to_json(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn tree(&self) -> String {
        self.0.tree().to_string()
    }

    #[getter]
    fn lengths(&self) -> Vec<f64> {
        self.0.lengths()
    }

    #[getter]
    fn labels(&self) -> Vec<PyFmPoint> {
        self.0.labels().into_iter().cloned().map(PyFmPoint).collect()
    }

    fn act(&self, perm: Vec<usize>, q: Vec<Vec<f64>>) -> PyResult<Self> {
        let g = group_element(perm, q)?;
        self.0.act(&g).map(PyWPoint).map_err(err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("WPoint(n={}, k={}, tree={})", self.0.dim(), self.0.arity(), self.0.tree())
    }
}

#[pyfunction]
#[pyo3(signature = (n, k, seed=0, region="interior", rho0=DEFAULT_RHO0))]
fn sample(n: usize, k: usize, seed: u64, region: &str, rho0: f64) -> PyResult<PyFmPoint> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    fm::sample_with(&mut rng, n, k, rho0, parse_region(region)?)
        .map(PyFmPoint)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, k, seed=0, rho0=DEFAULT_RHO0))]
fn sample_w(n: usize, k: usize, seed: u64, rho0: f64) -> PyResult<PyWPoint> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    w::sample_w_with(&mut rng, n, k, rho0).map(PyWPoint).map_err(err)
}

#[pyfunction]
fn beta(p: &PyFmPoint) -> PyResult<PyWPoint> {
    BetaContext::for_point(&p.0).beta(&p.0).map(PyWPoint).map_err(err)
}

#[pyfunction]
fn beta_inverse(w: &PyWPoint) -> PyResult<PyFmPoint> {
    let ctx = BetaContext::new(w.0.dim(), w.0.rho0()).map_err(err)?;
    ctx.beta_inverse(&w.0).map(PyFmPoint).map_err(err)
}

/// `a ∘_i b` in `F`.
#[pyfunction]
fn compose(a: &PyFmPoint, i: usize, b: &PyFmPoint) -> PyResult<PyFmPoint> {
    fm::compose_at(&a.0, i, &b.0).map(PyFmPoint).map_err(err)
}

/// `a ∘_i b` in `WF`; the new edge has length 1.
#[pyfunction]
fn w_compose(a: &PyWPoint, i: usize, b: &PyWPoint) -> PyResult<PyWPoint> {
    w::w_compose_at(&a.0, i, &b.0).map(PyWPoint).map_err(err)
}

#[pyfunction]
fn collar_apply(t: f64, x: &PyFmPoint) -> PyResult<PyFmPoint> {
    collar::collar_apply(t, &x.0).map(PyFmPoint).map_err(err)
}

/// `(t, x)` with `collar_apply(t, x) == y`, or `None` outside the collar.
#[pyfunction]
fn collar_invert(y: &PyFmPoint) -> Option<(f64, PyFmPoint)> {
    collar::collar_invert(&y.0).map(|(t, x)| (t, PyFmPoint(x)))
}

/// Chart distance between two points of the same stratum, `None` otherwise.
#[pyfunction]
fn chart_distance(p: &PyFmPoint, q: &PyFmPoint) -> PyResult<Option<f64>> {
    fm::chart_distance(&p.0, &q.0).map_err(err)
}

/// Canonical forms of all nested trees on `k` leaves.
#[pyfunction]
fn trees(k: usize) -> PyResult<Vec<String>> {
    let all = enumerate_trees(k).map_err(err)?;
    Ok(all.iter().map(NestedTree::to_string).collect())
}

/// Runs a named check suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (name, n=2, k=4, seed=0, trials=100))]
fn check(py: Python<'_>, name: &str, n: usize, k: usize, seed: u64, trials: usize) -> PyResult<String> {
    let suite: fn(&RunConfig) -> fmw_core::Result<checks::Report> = match name {
        "roundtrip" => checks::roundtrip,
        "axioms" => checks::axioms,
        "equivariance" => checks::equivariance,
        "seams" => checks::seams,
        "collar" => checks::collar_exactness,
        "max-length" => checks::max_length_law,
        "chart" => checks::chart_round_trip,
        "freeness" => checks::freeness,
        _ => return Err(PyValueError::new_err(format!("unknown check {name:?}"))),
    };
    let cfg = RunConfig::new(n, k, seed, trials);
    let report = py.detach(|| suite(&cfg)).map_err(err)?;
    serde_json::to_string(&report.summary()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn fmw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFmPoint>()?;
    m.add_class::<PyWPoint>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(sample_w, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(beta_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(w_compose, m)?)?;
    m.add_function(wrap_pyfunction!(collar_apply, m)?)?;
    m.add_function(wrap_pyfunction!(collar_invert, m)?)?;
    m.add_function(wrap_pyfunction!(chart_distance, m)?)?;
    m.add_function(wrap_pyfunction!(trees, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add("DEFAULT_RHO0", DEFAULT_RHO0)?;
    Ok(())
}
