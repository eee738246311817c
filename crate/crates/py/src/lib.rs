//! Python bindings: states, architectures, entropies, protocol trials, dimension
//! experiments and the experiment runner. Structured results come back as plain
//! dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde::Serialize;

use unclab::centropy::{self, SearchConfig};
use unclab::circuits::{self, has_light_cone};
use unclab::cli::{self, ExperimentConfig};
use unclab::fuzz::{FuzzModel, FuzzVariant};
use unclab::geometry;
use unclab::protocols::{self, BankState, ExpenditurePlan, ExtractionPlan};
use unclab::qcore;
use unclab::seed::{derive_seed, rng_from_seed};
use unclab::C64;

fn err(e: unclab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Round-trips through JSON so results arrive as native dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn fuzz_model(epsilon: f64, variant: &str) -> PyResult<FuzzModel> {
    let variant: FuzzVariant = variant.parse().map_err(err)?;
    Ok(FuzzModel { epsilon, variant })
}

fn search_config(restarts: usize, seed: u64) -> SearchConfig {
    SearchConfig::default().with_restarts(restarts).with_seed(seed)
}

#[pyclass(name = "PureState", module = "pyunclab", frozen)]
pub struct PyPureState(qcore::PureState);

#[pymethods]
impl PyPureState {
    #[new]
    fn new(amplitudes: Vec<C64>) -> PyResult<Self> {
        qcore::PureState::new(amplitudes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zero(n: usize) -> Self {
        Self(qcore::PureState::zero(n))
    }

    #[staticmethod]
    fn plus(n: usize) -> Self {
        Self(qcore::PureState::plus(n))
    }

    #[staticmethod]
    fn ghz(n: usize) -> Self {
        Self(qcore::PureState::ghz(n))
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed=0))]
    fn haar(n: usize, seed: u64) -> Self {
        Self(qcore::haar_state(n, &mut rng_from_seed(seed)))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.0.amps().to_vec()
    }

    fn inner(&self, other: &PyPureState) -> PyResult<C64> {
        self.0.inner(&other.0).map_err(err)
    }

    fn to_density(&self) -> PyDensityOp {
        PyDensityOp(self.0.to_density())
    }

    fn __repr__(&self) -> String {
        format!("PureState(n={})", self.0.n())
    }
}

#[pyclass(name = "DensityOp", module = "pyunclab", frozen)]
pub struct PyDensityOp(qcore::DensityOp);

#[pymethods]
impl PyDensityOp {
    /// From a square list of rows of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        qcore::DensityOp::new(m).map(Self).map_err(err)
    }

    #[staticmethod]
    fn maximally_mixed(n: usize) -> Self {
        Self(qcore::DensityOp::maximally_mixed(n))
    }

    /// Σ pᵢ|ψᵢ⟩⟨ψᵢ| from (weight, state) pairs.
    #[staticmethod]
    fn mixture(parts: Vec<(f64, PyRef<'_, PyPureState>)>) -> PyResult<Self> {
        let parts: Vec<(f64, qcore::PureState)> = parts.iter().map(|(w, s)| (*w, s.0.clone())).collect();
        qcore::DensityOp::mixture(&parts).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
    }

    /// Ascending.
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        self.0.partial_trace(&keep).map(Self).map_err(err)
    }

    fn prob_zero_on(&self, qubits: Vec<usize>) -> f64 {
        self.0.prob_zero_on(&qubits)
    }

    fn trace_distance(&self, other: &PyDensityOp) -> PyResult<f64> {
        qcore::trace_distance(&self.0, &other.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityOp(n={})", self.0.n())
    }
}

#[pyclass(name = "Architecture", module = "pyunclab", frozen)]
pub struct PyArchitecture(circuits::Architecture);

#[pymethods]
impl PyArchitecture {
    #[new]
    fn new(n: usize, slots: Vec<(usize, usize)>) -> PyResult<Self> {
        circuits::Architecture::new(n, slots).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, layers, periodic=false))]
    fn brickwork(n: usize, layers: usize, periodic: bool) -> PyResult<Self> {
        circuits::brickwork(n, layers, periodic).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, gates, seed=0))]
    fn random(n: usize, gates: usize, seed: u64) -> PyResult<Self> {
        circuits::random_architecture(n, gates, &mut rng_from_seed(seed)).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn slots(&self) -> Vec<(usize, usize)> {
        self.0.slots.clone()
    }

    #[getter]
    fn id(&self) -> String {
        self.0.id()
    }

    fn canonical(&self) -> Self {
        Self(self.0.canonical())
    }

    /// Smallest qubit whose backward light cone covers every qubit, if any.
    fn light_cone(&self) -> Option<usize> {
        has_light_cone(&self.0).1
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Architecture({})", self.0.id())
    }
}

#[pyfunction]
fn hypothesis_entropy(rho: &PyDensityOp, eta: f64) -> PyResult<f64> {
    centropy::hypothesis_entropy(&rho.0, eta).map(|h| h.value).map_err(err)
}

/// Dict with value, achieved_prob, eta, kind and the witness (mask + circuit).
#[pyfunction]
#[pyo3(signature = (rho, r, eta, restarts=32, seed=0))]
fn complexity_entropy<'py>(
    py: Python<'py>,
    rho: &PyDensityOp,
    r: usize,
    eta: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let h = py.detach(|| centropy::complexity_entropy(&rho.0, r, eta, &search_config(restarts, seed))).map_err(err)?;
    to_py(py, &h)
}

#[pyfunction]
#[pyo3(signature = (rho, r, delta, restarts=32, seed=0))]
fn extraction_converse(
    py: Python<'_>,
    rho: &PyDensityOp,
    r: usize,
    delta: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<usize> {
    py.detach(|| protocols::extraction_converse(&rho.0, r, delta, &search_config(restarts, seed))).map_err(err)
}

/// One dict per fuzzy trial; the witness search runs once.
#[pyfunction]
#[pyo3(signature = (rho, r, eta, delta, epsilon, trials=1, seed=0, variant="pauli-hamiltonian"))]
#[allow(clippy::too_many_arguments)]
fn extract<'py>(
    py: Python<'py>,
    rho: &PyDensityOp,
    r: usize,
    eta: f64,
    delta: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
    variant: &str,
) -> PyResult<Bound<'py, PyList>> {
    let model = fuzz_model(epsilon, variant)?;
    let results = py
        .detach(|| {
            let plan = ExtractionPlan::new(&rho.0, r, eta, delta, &search_config(32, seed))?;
            (0..trials as u64)
                .map(|t| plan.trial(&model, &mut rng_from_seed(derive_seed(seed, t))))
                .collect::<unclab::Result<Vec<_>>>()
        })
        .map_err(err)?;
    let items = results.iter().map(|r| to_py(py, r)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// One dict per fuzzy trial; `bank` is "maximally-mixed" or "random-pure".
#[pyfunction]
#[pyo3(signature = (rho, r, eta, delta, epsilon, bank="maximally-mixed", trials=1, seed=0, variant="pauli-hamiltonian"))]
#[allow(clippy::too_many_arguments)]
fn expend<'py>(
    py: Python<'py>,
    rho: &PyDensityOp,
    r: usize,
    eta: f64,
    delta: f64,
    epsilon: f64,
    bank: &str,
    trials: usize,
    seed: u64,
    variant: &str,
) -> PyResult<Bound<'py, PyList>> {
    let model = fuzz_model(epsilon, variant)?;
    let bank = match bank {
        "maximally-mixed" => BankState::MaximallyMixed,
        "random-pure" => BankState::RandomPure,
        other => return Err(PyValueError::new_err(format!("unknown bank state {other:?}"))),
    };
    let results = py
        .detach(|| {
            let plan = ExpenditurePlan::new(&rho.0, r, eta, delta, &search_config(32, seed))?;
            (0..trials as u64)
                .map(|t| plan.trial(&model, &bank, &mut rng_from_seed(derive_seed(seed, t))))
                .collect::<unclab::Result<Vec<_>>>()
        })
        .map_err(err)?;
    let items = results.iter().map(|r| to_py(py, r)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// Dimension report of the state-contraction map of `arch` on |0^n⟩.
#[pyfunction]
#[pyo3(signature = (arch, points=5, tol=1e-8, seed=0))]
fn accessible_dimension<'py>(
    py: Python<'py>,
    arch: &PyArchitecture,
    points: usize,
    tol: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let input = qcore::PureState::zero(arch.0.n);
    let rep = py
        .detach(|| geometry::accessible_dimension(&arch.0, &input, points, tol, &mut rng_from_seed(seed)))
        .map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (n, layers, epsilon=0.1, seed=0, tol=1e-8))]
fn brickwork_monotone_trial<'py>(
    py: Python<'py>,
    n: usize,
    layers: usize,
    epsilon: f64,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let t = geometry::brickwork_monotone_trial(n, layers, &FuzzModel::pauli(epsilon), tol, &mut rng_from_seed(seed))
        .map_err(err)?;
    to_py(py, &t)
}

#[pyfunction]
#[pyo3(signature = (n, k, r, points=3, seed=0, tol=1e-8))]
fn negentropy_dimension_trial<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    r: usize,
    points: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let t = py
        .detach(|| geometry::negentropy_dimension_trial(n, k, r, points, tol, &mut rng_from_seed(seed)))
        .map_err(err)?;
    to_py(py, &t)
}

/// Runs an experiment from a JSON config and returns its summary plus `exit_code`
/// and output paths. Configuration and regime errors raise ValueError.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg: ExperimentConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(format!("invalid config: {e}")))?;
    let outcome = py.detach(|| cli::run(&cfg)).map_err(err)?;
    let mut summary = outcome.summary.clone();
    if let serde_json::Value::Object(map) = &mut summary {
        map.insert("exit_code".into(), outcome.exit_code().into());
        map.insert("csv".into(), outcome.csv_path.display().to_string().into());
        map.insert("manifest".into(), outcome.manifest_path.display().to_string().into());
    }
    to_py(py, &summary)
}

#[pymodule]
pub fn pyunclab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityOp>()?;
    m.add_class::<PyArchitecture>()?;
    m.add_function(wrap_pyfunction!(hypothesis_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(complexity_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(extraction_converse, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(expend, m)?)?;
    m.add_function(wrap_pyfunction!(accessible_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(brickwork_monotone_trial, m)?)?;
    m.add_function(wrap_pyfunction!(negentropy_dimension_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
