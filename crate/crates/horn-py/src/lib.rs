//! Python module `horn`.
//!
//! Reports come back as plain dicts and lists; matrices as nested lists of `complex`.

use pyo3::exceptions::{PyLookupError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList};
use serde::Serialize;

use horn_core::angle::Angle;
use horn_core::isometry::{self, AnglePair, ClassTriple, Layer};
use horn_core::linalg::{c, GroupElement, HermitianForm, Mat3, Tolerances};
use horn_core::oracle::{self, OracleError, SamplerConfig};
use horn_core::parse;
use horn_core::polytopes;
use horn_core::slice::{self, SliceSpec};
use horn_core::walls;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize + ?Sized>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix_to_py<'py>(py: Python<'py>, m: &Mat3) -> PyResult<Bound<'py, PyList>> {
    let rows = (0..3)
        .map(|i| PyList::new(py, (0..3).map(|j| PyComplex::from_doubles(py, m[(i, j)].re, m[(i, j)].im))))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, rows)
}

fn matrix_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Mat3> {
    let rows: Vec<Vec<num_complex_shim::C>> = obj.extract()?;
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("expected a 3x3 matrix"));
    }
    Ok(Mat3::from_fn(|i, j| c(rows[i][j].0, rows[i][j].1)))
}

mod num_complex_shim {
    use pyo3::prelude::*;
    use pyo3::types::PyComplex;

    /// A Python number read as `(re, im)`.
    pub struct C(pub f64, pub f64);

    impl<'a, 'py> FromPyObject<'a, 'py> for C {
        type Error = PyErr;

        fn extract(ob: Borrowed<'a, 'py, PyAny>) -> PyResult<Self> {
            if let Ok(z) = ob.cast::<PyComplex>() {
                return Ok(C(z.real(), z.imag()));
            }
            Ok(C(ob.extract::<f64>()?, 0.0))
        }
    }
}

fn angle_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Angle> {
    if let Ok(s) = obj.extract::<String>() {
        return parse::parse_angle(&s).map_err(value_err);
    }
    Ok(Angle::radians(obj.extract::<f64>()?))
}

/// Elliptic class coordinates; angles may be floats (radians) or strings like `"2pi/3"`.
#[pyclass(name = "AnglePair", frozen, from_py_object, module = "horn")]
#[derive(Clone)]
pub struct PyAnglePair(AnglePair);

#[pymethods]
impl PyAnglePair {
    #[new]
    fn new(a1: &Bound<'_, PyAny>, a2: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyAnglePair(AnglePair::new(angle_from_py(a1)?, angle_from_py(a2)?)))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse::parse_pair(text).map(PyAnglePair).map_err(value_err)
    }

    #[getter]
    fn a1(&self) -> f64 {
        self.0.radians().0
    }

    #[getter]
    fn a2(&self) -> f64 {
        self.0.radians().1
    }

    fn radians(&self) -> (f64, f64) {
        self.0.radians()
    }

    fn inverse(&self) -> Self {
        PyAnglePair(self.0.inverse())
    }

    fn is_interior(&self) -> bool {
        self.0.is_interior()
    }

    fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    fn __repr__(&self) -> String {
        format!("AnglePair({}, {})", self.0.a1(), self.0.a2())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "ClassTriple", frozen, from_py_object, module = "horn")]
#[derive(Clone)]
pub struct PyClassTriple(ClassTriple);

#[pymethods]
impl PyClassTriple {
    #[new]
    fn new(alpha: PyAnglePair, beta: PyAnglePair, gamma: PyAnglePair) -> Self {
        PyClassTriple(ClassTriple::new(alpha.0, beta.0, gamma.0))
    }

    /// `"a1,a2;b1,b2;c1,c2"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse::parse_tau(text).map(PyClassTriple).map_err(value_err)
    }

    #[getter]
    fn alpha(&self) -> PyAnglePair {
        PyAnglePair(self.0.alpha)
    }

    #[getter]
    fn beta(&self) -> PyAnglePair {
        PyAnglePair(self.0.beta)
    }

    #[getter]
    fn gamma(&self) -> PyAnglePair {
        PyAnglePair(self.0.gamma)
    }

    fn radians(&self) -> [f64; 6] {
        self.0.radians()
    }

    fn psi(&self) -> Self {
        PyClassTriple(isometry::psi(&self.0))
    }

    /// Values of S, σ_ijk and H_ijk.
    fn forms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &walls::linear_forms(&self.0))
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn member<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &polytopes::polytope_member(&self.0, tol))
    }

    #[pyo3(signature = (tol = None))]
    fn active_walls(&self, tol: Option<f64>) -> Vec<String> {
        let tol = tol.unwrap_or_else(|| walls::default_wall_tol(&self.0));
        walls::active_walls(&self.0, tol).into_iter().map(|(w, _)| w.name()).collect()
    }

    fn __repr__(&self) -> String {
        format!("ClassTriple{}", self.0)
    }
}

fn triple_arg(obj: &Bound<'_, PyAny>) -> PyResult<ClassTriple> {
    if let Ok(s) = obj.extract::<String>() {
        return parse::parse_tau(&s).map_err(value_err);
    }
    Ok(obj.extract::<PyClassTriple>()?.0)
}

fn pair_arg(obj: &Bound<'_, PyAny>) -> PyResult<AnglePair> {
    if let Ok(s) = obj.extract::<String>() {
        return parse::parse_pair(&s).map_err(value_err);
    }
    Ok(obj.extract::<PyAnglePair>()?.0)
}

fn slice_arg(
    beta: Option<&Bound<'_, PyAny>>,
    gamma: Option<&Bound<'_, PyAny>>,
    resolution: usize,
) -> PyResult<SliceSpec> {
    if resolution < 16 {
        return Err(PyValueError::new_err("resolution must be at least 16"));
    }
    let spec = match (beta, gamma) {
        (Some(b), Some(g)) => SliceSpec::fixed(pair_arg(b)?, pair_arg(g)?),
        (None, None) => SliceSpec::symmetric(),
        _ => return Err(PyValueError::new_err("give both beta and gamma, or neither for the symmetric slice")),
    };
    Ok(spec.with_resolution(resolution))
}

/// Radians, plus the exact multiple of π as a string when the input was rational.
#[pyfunction]
fn parse_angle(text: &str) -> PyResult<(f64, Option<String>)> {
    let a = parse::parse_angle(text).map_err(value_err)?;
    Ok((a.to_radians(), a.is_exact().then(|| a.to_string())))
}

#[pyfunction]
#[pyo3(signature = (tau, tol = 1e-9))]
fn polytope_member<'py>(py: Python<'py>, tau: &Bound<'py, PyAny>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &polytopes::polytope_member(&triple_arg(tau)?, tol))
}

#[pyfunction]
#[pyo3(signature = (tau, tol = 1e-9))]
fn in_solution_set(tau: &Bound<'_, PyAny>, tol: f64) -> PyResult<bool> {
    Ok(polytopes::in_solution_set(&triple_arg(tau)?, tol))
}

#[pyfunction]
fn surjective_pair(alpha: &Bound<'_, PyAny>, beta: &Bound<'_, PyAny>) -> PyResult<bool> {
    Ok(polytopes::surjective_pair(&pair_arg(alpha)?, &pair_arg(beta)?))
}

#[pyfunction]
fn wall_catalog<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, walls::wall_catalog())
}

#[pyfunction]
fn cell_table<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, polytopes::cell_table())
}

/// Class of a 3x3 matrix preserving `form` (default diag(1, 1, -1)).
#[pyfunction]
#[pyo3(signature = (matrix, form = None))]
fn classify<'py>(
    py: Python<'py>,
    matrix: &Bound<'py, PyAny>,
    form: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let m = matrix_from_py(matrix)?;
    let h = match form {
        None => HermitianForm::standard(),
        Some(f) => HermitianForm::new(matrix_from_py(f)?, 1e-9).map_err(value_err)?,
    };
    let cls = isometry::classify(&GroupElement::from_parts(m, h), &Tolerances::default()).map_err(value_err)?;
    to_py(py, &cls)
}

/// Matrices realizing `tau`; raises `LookupError` when the search budget runs out.
#[pyfunction]
#[pyo3(signature = (tau, seed = 42, budget = 200_000, tol = 0.05))]
fn find_witness<'py>(
    py: Python<'py>,
    tau: &Bound<'py, PyAny>,
    seed: u64,
    budget: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = triple_arg(tau)?;
    let cfg = SamplerConfig { seed, budget, tol, ..Default::default() };
    let w = py.detach(|| oracle::find_witness(&t, &cfg)).map_err(|e| match e {
        OracleError::NotFound { .. } => PyLookupError::new_err(e.to_string()),
        other => value_err(other),
    })?;
    let d = to_py(py, &w)?.cast_into::<PyDict>()?;
    for (key, m) in [("a", &w.a), ("b", &w.b), ("c", &w.c)] {
        d.set_item(key, matrix_to_py(py, m)?)?;
    }
    d.set_item("product_scalar", PyComplex::from_doubles(py, w.product_scalar.re, w.product_scalar.im))?;
    Ok(d)
}

/// The explicit irreducible triple in its own form and transported to diag(1, 1, -1).
#[pyfunction]
fn decompfamily_witness<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let d = oracle::decompfamily_witness();
    let out = PyDict::new(py);
    out.set_item("H", matrix_to_py(py, d.h.matrix())?)?;
    for (k, r) in d.r.iter().enumerate() {
        out.set_item(format!("R{}", k + 1), matrix_to_py(py, r.matrix())?)?;
    }
    out.set_item("A", matrix_to_py(py, d.a.matrix())?)?;
    out.set_item("B", matrix_to_py(py, d.b.matrix())?)?;
    out.set_item("C", matrix_to_py(py, d.c.matrix())?)?;
    out.set_item("transport", matrix_to_py(py, &d.transport)?)?;
    out.set_item("A_std", matrix_to_py(py, &d.a_std)?)?;
    out.set_item("B_std", matrix_to_py(py, &d.b_std)?)?;
    out.set_item("C_std", matrix_to_py(py, &d.c_std)?)?;
    Ok(out)
}

/// SVG text of a slice; the symmetric slice when `beta` and `gamma` are omitted.
#[pyfunction]
#[pyo3(signature = (beta = None, gamma = None, resolution = 600))]
fn render_slice(
    py: Python<'_>,
    beta: Option<&Bound<'_, PyAny>>,
    gamma: Option<&Bound<'_, PyAny>>,
    resolution: usize,
) -> PyResult<String> {
    let spec = slice_arg(beta, gamma, resolution)?;
    Ok(py.detach(|| slice::render_slice(&spec)))
}

/// Connected components per layer, keyed "omega", "1", "omega^2".
#[pyfunction]
#[pyo3(signature = (beta = None, gamma = None, resolution = 600))]
fn slice_components(
    py: Python<'_>,
    beta: Option<&Bound<'_, PyAny>>,
    gamma: Option<&Bound<'_, PyAny>>,
    resolution: usize,
) -> PyResult<std::collections::BTreeMap<String, usize>> {
    let spec = slice_arg(beta, gamma, resolution)?;
    let r = py.detach(|| slice::rasterize(&spec));
    Ok(Layer::ALL.iter().map(|&l| (l.as_str().to_string(), r.component_count(l))).collect())
}

#[pyfunction]
#[pyo3(signature = (beta = None, gamma = None, grid = 12, seed = 42, budget = 200_000, separation = 0.05))]
fn verify_grid<'py>(
    py: Python<'py>,
    beta: Option<&Bound<'py, PyAny>>,
    gamma: Option<&Bound<'py, PyAny>>,
    grid: usize,
    seed: u64,
    budget: usize,
    separation: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = slice_arg(beta, gamma, SliceSpec::DEFAULT_RESOLUTION)?;
    let cfg = SamplerConfig { seed, budget, ..Default::default() };
    let report = py.detach(|| oracle::verify_grid(&spec, grid, &cfg, separation));
    to_py(py, &report)
}

#[pymodule]
fn horn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAnglePair>()?;
    m.add_class::<PyClassTriple>()?;
    m.add_function(wrap_pyfunction!(parse_angle, m)?)?;
    m.add_function(wrap_pyfunction!(polytope_member, m)?)?;
    m.add_function(wrap_pyfunction!(in_solution_set, m)?)?;
    m.add_function(wrap_pyfunction!(surjective_pair, m)?)?;
    m.add_function(wrap_pyfunction!(wall_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(cell_table, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(find_witness, m)?)?;
    m.add_function(wrap_pyfunction!(decompfamily_witness, m)?)?;
    m.add_function(wrap_pyfunction!(render_slice, m)?)?;
    m.add_function(wrap_pyfunction!(slice_components, m)?)?;
    m.add_function(wrap_pyfunction!(verify_grid, m)?)?;
    Ok(())
}
