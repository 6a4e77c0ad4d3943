//! Python bindings: generators, analyzers, operators, conditions and the
//! TOML-driven experiment harness.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use quasiproj::conditions::{self, CheckOptions};
use quasiproj::harness::{self, ExperimentConfig};
use quasiproj::smoothness;
use quasiproj::{AnalysisFunctional, AxisBox, DilationMatrix, Error, Generator, GeneratorKind, Grid, OperatorSpec, TestFunction};

create_exception!(pyquasiproj, HypothesisViolated, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::HypothesisViolated(msg) => HypothesisViolated::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<T: serde::Serialize + ?Sized>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "Generator", module = "pyquasiproj", frozen, skip_from_py_object)]
struct PyGenerator(Generator);

#[pymethods]
impl PyGenerator {
    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn sinc(dim: usize) -> PyResult<Self> {
        Generator::new(
            GeneratorKind::TensorSincPower {
                n: 1,
                a: 1.0,
                constant: None,
            },
            dim,
        )
        .map(Self)
        .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, a=1.0, constant=None, dim=1))]
    fn sinc_power(n: u32, a: f64, constant: Option<f64>, dim: usize) -> PyResult<Self> {
        Generator::new(GeneratorKind::TensorSincPower { n, a, constant }, dim)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, dim=1))]
    fn bspline(n: u32, dim: usize) -> PyResult<Self> {
        Generator::bspline(n, dim).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (s, gamma, dim=1))]
    fn bochner_riesz(s: f64, gamma: f64, dim: usize) -> PyResult<Self> {
        Generator::new(GeneratorKind::BochnerRiesz { s, gamma }, dim)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn rational_bandlimited(dim: usize) -> PyResult<Self> {
        Generator::new(GeneratorKind::RationalBandlimited, dim)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn fourier(&self, xi: Vec<f64>) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), xi.len())?;
        Ok(self.0.eval_fourier(&xi))
    }

    fn spatial(&self, x: Vec<f64>) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), x.len())?;
        self.0.eval_spatial(&x).map_err(to_py)
    }

    #[pyo3(signature = (s_max=6, lattice_radius=2))]
    fn strang_fix_order(&self, s_max: usize, lattice_radius: i64) -> PyResult<usize> {
        conditions::strang_fix_order(&self.0, s_max, lattice_radius).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Generator({})", self.0.name())
    }
}

fn check_dim(expected: usize, got: usize) -> PyResult<()> {
    if expected != got {
        return Err(to_py(Error::DimensionMismatch { expected, got }));
    }
    Ok(())
}

#[pyclass(name = "Analyzer", module = "pyquasiproj", frozen, skip_from_py_object)]
struct PyAnalyzer(AnalysisFunctional);

#[pymethods]
impl PyAnalyzer {
    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn dirac(dim: usize) -> Self {
        Self(AnalysisFunctional::Dirac { dim })
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn box_average(dim: usize) -> Self {
        Self(AnalysisFunctional::BoxAverage { dim })
    }

    #[staticmethod]
    fn dirac_derivative(beta: Vec<u32>) -> Self {
        Self(AnalysisFunctional::DiracDerivative { beta })
    }

    #[staticmethod]
    fn dirac_plus_derivative(beta: Vec<u32>) -> Self {
        Self(AnalysisFunctional::DiracPlusDerivative { beta })
    }

    #[staticmethod]
    fn kernel(kernel: &PyGenerator) -> PyResult<Self> {
        AnalysisFunctional::kernel(kernel.0.clone()).map(Self).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name()
    }

    fn symbol(&self, xi: Vec<f64>) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), xi.len())?;
        Ok(self.0.fourier_symbol(&xi))
    }

    fn __repr__(&self) -> String {
        format!("Analyzer({})", self.0.name())
    }
}

#[pyclass(name = "Function", module = "pyquasiproj", frozen, skip_from_py_object)]
struct PyFunction(TestFunction);

#[pymethods]
impl PyFunction {
    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn gaussian(dim: usize) -> Self {
        Self(TestFunction::gaussian(dim))
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1, rho=0.4))]
    fn band_bump(dim: usize, rho: f64) -> PyResult<Self> {
        TestFunction::band_bump(dim, rho).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn hat(dim: usize) -> Self {
        Self(TestFunction::hat(dim))
    }

    #[staticmethod]
    #[pyo3(signature = (dim=1))]
    fn sinc(dim: usize) -> Self {
        Self(TestFunction::sinc(dim))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), x.len())?;
        Ok(self.0.eval(&x))
    }

    /// `ω_s(f, t)_p` on the box `[−half_width, half_width]^d`.
    #[pyo3(signature = (s, t, p=2.0, half_width=8.0, points=1024))]
    fn omega(&self, s: f64, t: f64, p: f64, half_width: f64, points: usize) -> PyResult<f64> {
        let grid = Grid::new(AxisBox::cube(self.0.dim(), half_width), points).map_err(to_py)?;
        Ok(smoothness::omega(&self.0, s, t, p, &grid).map_err(to_py)?.value)
    }
}

#[pyclass(name = "Operator", module = "pyquasiproj", frozen)]
struct PyOperator(OperatorSpec);

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (generator, analyzer, dilation, level=0))]
    fn new(generator: &PyGenerator, analyzer: &PyAnalyzer, dilation: Vec<Vec<f64>>, level: i32) -> PyResult<Self> {
        let m = DilationMatrix::new(&dilation).map_err(to_py)?;
        OperatorSpec::new(generator.0.clone(), analyzer.0.clone(), m, level)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn level(&self) -> i32 {
        self.0.level
    }

    fn with_level(&self, level: i32) -> PyResult<Self> {
        self.0.with_level(level).map(Self).map_err(to_py)
    }

    /// `Q_j f(x)` summed over the index window of the given radius.
    #[pyo3(signature = (f, x, radius=32))]
    fn __call__(&self, f: &PyFunction, x: Vec<f64>, radius: i64) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), x.len())?;
        Ok(self.0.evaluate_spatial(&f.0, &x, radius).map_err(to_py)?.value)
    }

    /// `F(Q_j f)(ξ)`.
    fn spectral(&self, f: &PyFunction, xi: Vec<f64>) -> PyResult<num_complex::Complex64> {
        check_dim(self.0.dim(), xi.len())?;
        self.0.evaluate_spectral(&f.0, &xi).map_err(to_py)
    }

    fn conditions(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = conditions::check_conditions(&self.0.generator, &self.0.analyzer, &CheckOptions::default())
            .map_err(to_py)?;
        json_to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("Operator({}, {}, j={})", self.0.generator.name(), self.0.analyzer.name(), self.0.level)
    }
}

#[pyclass(name = "Config", module = "pyquasiproj", frozen)]
struct PyConfig(ExperimentConfig);

#[pymethods]
impl PyConfig {
    #[new]
    fn new(toml: &str) -> PyResult<Self> {
        ExperimentConfig::from_toml(toml).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        ExperimentConfig::load(&path).map(Self).map_err(to_py)
    }

    #[getter]
    fn hash(&self) -> String {
        harness::config_hash(&self.0)
    }

    fn operator(&self) -> PyResult<PyOperator> {
        self.0.operator_spec().map(PyOperator).map_err(to_py)
    }

    fn function(&self) -> PyResult<PyFunction> {
        self.0.test_function().map(PyFunction).map_err(to_py)
    }

    /// Runs the rate experiment and returns the report as a dict.
    fn run(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = py.detach(|| harness::run_experiment(&self.0)).map_err(to_py)?;
        json_to_py(py, &report)
    }

    /// The report rendered as `json` or `csv` text.
    #[pyo3(signature = (format="json"))]
    fn render(&self, py: Python<'_>, format: &str) -> PyResult<String> {
        let fmt = harness::Format::parse(format).map_err(to_py)?;
        let report = py.detach(|| harness::run_experiment(&self.0)).map_err(to_py)?;
        Ok(report.render(fmt))
    }

    #[pyo3(signature = (delta=None))]
    fn reconstruct(&self, py: Python<'_>, delta: Option<f64>) -> PyResult<Py<PyAny>> {
        let mut cfg = self.0.clone();
        if delta.is_some() {
            cfg.experiment.delta = delta;
        }
        let report = py.detach(|| harness::reconstruct(&cfg)).map_err(to_py)?;
        json_to_py(py, &report)
    }
}

/// Slope and largest residual of a `log₂` least-squares fit.
#[pyfunction]
fn rate_fit(levels: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    let f = harness::rate_fit(&levels).map_err(to_py)?;
    Ok((f.slope, f.residual))
}

#[pyfunction]
#[pyo3(signature = (generator, analyzer, s_max=6))]
fn weak_compat_order(generator: &PyGenerator, analyzer: &PyAnalyzer, s_max: usize) -> PyResult<usize> {
    conditions::weak_compat_order(&generator.0, &analyzer.0, s_max).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (generator, analyzer, grid=64))]
fn strict_compat_radius(generator: &PyGenerator, analyzer: &PyAnalyzer, grid: usize) -> PyResult<f64> {
    conditions::strict_compat_radius(&generator.0, &analyzer.0, grid).map_err(to_py)
}

#[pyfunction]
fn catalog(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let map: serde_json::Map<String, serde_json::Value> = harness::catalog()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.into()))
        .collect();
    json_to_py(py, &map)
}

#[pymodule]
fn pyquasiproj(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("HypothesisViolated", m.py().get_type::<HypothesisViolated>())?;
    m.add_class::<PyGenerator>()?;
    m.add_class::<PyAnalyzer>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(rate_fit, m)?)?;
    m.add_function(wrap_pyfunction!(weak_compat_order, m)?)?;
    m.add_function(wrap_pyfunction!(strict_compat_radius, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    Ok(())
}
