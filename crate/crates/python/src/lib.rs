use momentkit::{extension, measure, moments, sos, Pick, Tolerances};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(momentkit_py, MomentkitError, PyException);

fn err(e: impl Into<momentkit::Error>) -> PyErr {
    let e = e.into();
    MomentkitError::new_err(format!("{}: {}", e.kind(), e))
}

#[pyclass(name = "Polynomial", module = "momentkit_py", from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    inner: momentkit::Polynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(coeffs: Vec<f64>) -> PyResult<Self> {
        momentkit::Polynomial::try_new(coeffs)
            .map(|inner| PyPolynomial { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    /// `None` for the zero polynomial.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn __add__(&self, other: &PyPolynomial) -> PyPolynomial {
        PyPolynomial {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &PyPolynomial) -> PyPolynomial {
        PyPolynomial {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &PyPolynomial) -> PyPolynomial {
        PyPolynomial {
            inner: &self.inner * &other.inner,
        }
    }

    fn scale(&self, factor: f64) -> PyPolynomial {
        PyPolynomial {
            inner: self.inner.scale(factor),
        }
    }

    /// Roots as `(re, im)` pairs.
    fn roots(&self) -> PyResult<Vec<(f64, f64)>> {
        let set = self.inner.roots().map_err(err)?;
        Ok(set.roots.iter().map(|z| (z.re, z.im)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?})", self.inner.coeffs())
    }
}

#[pyclass(name = "PsdVerdict", module = "momentkit_py", get_all)]
struct PyPsdVerdict {
    is_psd: bool,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
    witness: Option<Vec<f64>>,
}

impl From<moments::PsdVerdict> for PyPsdVerdict {
    fn from(v: moments::PsdVerdict) -> Self {
        PyPsdVerdict {
            is_psd: v.is_psd,
            min_eigenvalue: v.min_eigenvalue,
            max_eigenvalue: v.max_eigenvalue,
            witness: v.witness,
        }
    }
}

#[pymethods]
impl PyPsdVerdict {
    fn __repr__(&self) -> String {
        format!("PsdVerdict(is_psd={}, min_eigenvalue={:e})", self.is_psd, self.min_eigenvalue)
    }
}

#[pyclass(name = "AtomicMeasure", module = "momentkit_py", from_py_object)]
#[derive(Clone)]
struct PyAtomicMeasure {
    inner: measure::AtomicMeasure,
}

#[pymethods]
impl PyAtomicMeasure {
    #[new]
    fn new(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        measure::AtomicMeasure::from_pairs(&atoms)
            .map(|inner| PyAtomicMeasure { inner })
            .map_err(err)
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.atoms().iter().map(|a| a.weight).collect()
    }

    fn moment(&self, k: usize) -> f64 {
        self.inner.moment(k)
    }

    fn integrate(&self, g: &PyFunctionSpec) -> PyResult<f64> {
        measure::integrate(&self.inner, &g.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let atoms: Vec<(f64, f64)> = self.inner.atoms().iter().map(|a| (a.node, a.weight)).collect();
        format!("AtomicMeasure({atoms:?})")
    }
}

#[pyclass(name = "MomentSequence", module = "momentkit_py", from_py_object)]
#[derive(Clone)]
struct PyMomentSequence {
    inner: moments::MomentSequence,
}

#[pymethods]
impl PyMomentSequence {
    #[new]
    fn new(moments: Vec<f64>) -> PyResult<Self> {
        moments::MomentSequence::new(moments)
            .map(|inner| PyMomentSequence { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_atoms(atoms: Vec<(f64, f64)>, m: usize) -> PyResult<Self> {
        moments::MomentSequence::from_atoms(&atoms, m)
            .map(|inner| PyMomentSequence { inner })
            .map_err(err)
    }

    #[getter]
    fn moments(&self) -> Vec<f64> {
        self.inner.as_slice().to_vec()
    }

    #[pyo3(signature = (tol = moments::DEFAULT_PSD_TOL))]
    fn hamburger_check(&self, tol: f64) -> PyPsdVerdict {
        moments::hamburger_check(&self.inner, tol).into()
    }

    /// `L(f) = sum c_j s_j`.
    fn apply(&self, f: &PyPolynomial) -> PyResult<f64> {
        moments::functional_apply(&self.inner, &f.inner).map_err(err)
    }

    #[pyo3(signature = (tol = moments::DEFAULT_PSD_TOL))]
    fn recover(&self, tol: f64) -> PyResult<PyAtomicMeasure> {
        measure::recover_measure_with_tol(&self.inner, tol)
            .map(|inner| PyAtomicMeasure { inner })
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.as_slice().len()
    }

    fn __repr__(&self) -> String {
        format!("MomentSequence({:?})", self.inner.as_slice())
    }
}

#[pyclass(name = "FunctionSpec", module = "momentkit_py", from_py_object)]
#[derive(Clone)]
struct PyFunctionSpec {
    inner: momentkit::FunctionSpec,
}

#[pymethods]
impl PyFunctionSpec {
    /// Parses the JSON form, builtin or sampled.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| PyFunctionSpec { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn sampled(grid: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        momentkit::FunctionSpec::sampled(grid, values, None)
            .map(|inner| PyFunctionSpec { inner })
            .map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(err)
    }
}

/// Either a two-square certificate (`kind == "certificate"`, `p`, `q`,
/// `residual`) or a negativity witness (`kind == "witness"`, `x0`, `value`).
#[pyclass(name = "SosResult", module = "momentkit_py", get_all)]
struct PySosResult {
    kind: &'static str,
    p: Option<PyPolynomial>,
    q: Option<PyPolynomial>,
    residual: Option<f64>,
    x0: Option<f64>,
    value: Option<f64>,
}

#[pymethods]
impl PySosResult {
    fn __repr__(&self) -> String {
        match self.kind {
            "certificate" => format!("SosResult(certificate, residual={:e})", self.residual.unwrap_or(f64::NAN)),
            _ => format!("SosResult(witness, x0={}, value={})", self.x0.unwrap_or(f64::NAN), self.value.unwrap_or(f64::NAN)),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (f, sos_tol = sos::DEFAULT_SOS_TOL))]
fn sos_decompose(f: &PyPolynomial, sos_tol: f64) -> PyResult<PySosResult> {
    Ok(match sos::sos_decompose_with_tol(&f.inner, sos_tol).map_err(err)? {
        sos::SosOutcome::Certificate(c) => PySosResult {
            kind: "certificate",
            p: Some(PyPolynomial { inner: c.p }),
            q: Some(PyPolynomial { inner: c.q }),
            residual: Some(c.residual),
            x0: None,
            value: None,
        },
        sos::SosOutcome::Witness(w) => PySosResult {
            kind: "witness",
            p: None,
            q: None,
            residual: None,
            x0: Some(w.x0),
            value: Some(w.value),
        },
    })
}

#[pyclass(name = "SandwichResult", module = "momentkit_py", get_all)]
struct PySandwichResult {
    lower: f64,
    upper: f64,
    e: f64,
    minorant: PyPolynomial,
    majorant: PyPolynomial,
    grid: Vec<f64>,
    fine_grid_violation: f64,
    measure: PyAtomicMeasure,
}

#[pymethods]
impl PySandwichResult {
    #[getter]
    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn __repr__(&self) -> String {
        format!("SandwichResult(lower={}, upper={}, e={})", self.lower, self.upper, self.e)
    }
}

fn parse_pick(pick: &str) -> PyResult<Pick> {
    pick.parse().map_err(PyValueError::new_err)
}

#[pyfunction]
#[pyo3(signature = (s, g, degree, grid_size = 201, pick = "midpoint"))]
fn extend(s: &PyMomentSequence, g: &PyFunctionSpec, degree: usize, grid_size: usize, pick: &str) -> PyResult<PySandwichResult> {
    let cfg = extension::SandwichConfig::new(degree, grid_size).pick(parse_pick(pick)?);
    let r = extension::extend(&s.inner, &g.inner, &cfg).map_err(err)?;
    Ok(PySandwichResult {
        lower: r.lower,
        upper: r.upper,
        e: r.e,
        minorant: PyPolynomial { inner: r.minorant },
        majorant: PyPolynomial { inner: r.majorant },
        grid: r.grid,
        fine_grid_violation: r.fine_grid_violation,
        measure: PyAtomicMeasure { inner: r.measure },
    })
}

#[pyfunction]
fn trunc_monomial_limit(s: &PyMomentSequence, n: u32, k_values: Vec<u32>) -> PyResult<Vec<f64>> {
    extension::trunc_monomial_limit(&s.inner, n, &k_values).map_err(err)
}

/// Full report as a JSON string.
#[pyfunction]
#[pyo3(signature = (s, g, degree, grid_size = 201, pick = "midpoint"))]
fn pipeline(s: &PyMomentSequence, g: &PyFunctionSpec, degree: usize, grid_size: usize, pick: &str) -> PyResult<String> {
    let report = momentkit::run_pipeline(&s.inner, &g.inner, degree, grid_size, parse_pick(pick)?, &Tolerances::default())
        .map_err(|e| MomentkitError::new_err(format!("{}: {}", e.error.kind(), e)))?;
    Ok(momentkit::to_string_g17(&report).expect("serializable"))
}

/// Pass/fail table as a JSON string.
#[pyfunction]
#[pyo3(signature = (seed = 0, trials = 50))]
fn selftest(seed: u64, trials: usize) -> String {
    momentkit::to_string_g17(&momentkit::run_selftest(seed, trials)).expect("serializable")
}

#[pymodule]
fn momentkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MomentkitError", m.py().get_type::<MomentkitError>())?;
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyPsdVerdict>()?;
    m.add_class::<PyMomentSequence>()?;
    m.add_class::<PyAtomicMeasure>()?;
    m.add_class::<PyFunctionSpec>()?;
    m.add_class::<PySosResult>()?;
    m.add_class::<PySandwichResult>()?;
    m.add_function(wrap_pyfunction!(sos_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(trunc_monomial_limit, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
