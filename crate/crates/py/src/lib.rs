//! Python module `uncertainty_lab`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use uncertainty_lab::dynamics::{moment_trajectory, uniform_times, DpaConfig};
use uncertainty_lab::explorer::{classify_smus, gap_objective, scan_grid, GapKind};
use uncertainty_lab::fock::{self, fit_dim, ladder_ops, quadratures, GaussianParams, QuantumState};
use uncertainty_lab::linalg::char_coeffs as core_char_coeffs;
use uncertainty_lab::moments::{self, CommutatorMatrix, CovarianceMatrix, Observable};
use uncertainty_lab::relations;
use uncertainty_lab::CMatrix;

fn to_py(e: uncertainty_lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for uncertainty_lab::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "ModeConfig", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModeConfig(fock::ModeConfig);

#[pymethods]
impl PyModeConfig {
    #[new]
    #[pyo3(signature = (dim = 64, hbar = 1.0, mass = 1.0, omega = 1.0))]
    fn new(dim: usize, hbar: f64, mass: f64, omega: f64) -> PyResult<Self> {
        fock::ModeConfig::with_units(dim, hbar, mass, omega)
            .py()
            .map(Self)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }

    fn __repr__(&self) -> String {
        format!(
            "ModeConfig(dim={}, hbar={}, mass={}, omega={})",
            self.0.dim, self.0.hbar, self.0.mass, self.0.omega
        )
    }
}

#[pyclass(name = "StateVector", frozen, from_py_object)]
#[derive(Clone)]
struct PyStateVector(fock::StateVector);

#[pymethods]
impl PyStateVector {
    #[new]
    fn new(config: PyModeConfig, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        fock::StateVector::new(config.0, amplitudes).py().map(Self)
    }

    #[getter]
    fn config(&self) -> PyModeConfig {
        PyModeConfig(*self.0.config())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn tail_weight(&self) -> f64 {
        self.0.tail_weight()
    }

    fn __repr__(&self) -> String {
        format!("StateVector(dim={})", self.0.dim())
    }
}

#[pyclass(name = "DensityMatrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix(fock::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[staticmethod]
    fn from_pure(psi: PyStateVector) -> Self {
        Self(fock::DensityMatrix::from_pure(&psi.0))
    }

    #[staticmethod]
    fn mixture(states: Vec<PyStateVector>, weights: Vec<f64>) -> PyResult<Self> {
        let states: Vec<_> = states.into_iter().map(|s| s.0).collect();
        fock::DensityMatrix::mixture(&states, &weights)
            .py()
            .map(Self)
    }

    #[staticmethod]
    #[pyo3(signature = (config, nbar, alpha = Complex64::new(0.0, 0.0)))]
    fn thermal(config: PyModeConfig, nbar: f64, alpha: Complex64) -> PyResult<Self> {
        fit_dim(&config.0, |c| fock::DensityMatrix::thermal(c, nbar, alpha))
            .py()
            .map(Self)
    }

    #[getter]
    fn config(&self) -> PyModeConfig {
        PyModeConfig(*self.0.config())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityMatrix(dim={}, purity={})",
            self.0.dim(),
            self.0.purity()
        )
    }
}

#[derive(FromPyObject)]
enum AnyState {
    Pure(PyStateVector),
    Mixed(PyDensityMatrix),
}

impl AnyState {
    fn into_state(self) -> fock::State {
        match self {
            AnyState::Pure(s) => fock::State::Pure(s.0),
            AnyState::Mixed(s) => fock::State::Mixed(s.0),
        }
    }
}

#[pyclass(name = "RelationReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyRelationReport {
    name: String,
    lhs: f64,
    rhs: f64,
    gap: f64,
    satisfied: bool,
    saturated: bool,
    mixed: bool,
}

impl From<relations::RelationReport> for PyRelationReport {
    fn from(r: relations::RelationReport) -> Self {
        Self {
            name: r.name,
            lhs: r.lhs,
            rhs: r.rhs,
            gap: r.gap,
            satisfied: r.satisfied,
            saturated: r.saturated,
            mixed: r.mixed,
        }
    }
}

#[pymethods]
impl PyRelationReport {
    fn __repr__(&self) -> String {
        format!(
            "RelationReport(name={:?}, lhs={}, rhs={}, gap={}, satisfied={}, saturated={})",
            self.name,
            self.lhs,
            self.rhs,
            self.gap,
            if self.satisfied { "True" } else { "False" },
            if self.saturated { "True" } else { "False" }
        )
    }
}

#[pyfunction]
fn vacuum(config: PyModeConfig) -> PyResult<PyStateVector> {
    fock::vacuum(&config.0).py().map(PyStateVector)
}

#[pyfunction]
fn fock_state(config: PyModeConfig, k: usize) -> PyResult<PyStateVector> {
    fock::fock_state(&config.0, k).py().map(PyStateVector)
}

/// Raises the dimension as needed unless `fit` is false.
#[pyfunction]
#[pyo3(signature = (config, alpha, fit = true))]
fn coherent(config: PyModeConfig, alpha: Complex64, fit: bool) -> PyResult<PyStateVector> {
    let build = |c: &fock::ModeConfig| fock::coherent(c, alpha);
    if fit {
        fit_dim(&config.0, build)
    } else {
        build(&config.0)
    }
    .py()
    .map(PyStateVector)
}

#[pyfunction]
#[pyo3(signature = (config, alpha, r, theta, fit = true))]
fn squeezed(
    config: PyModeConfig,
    alpha: Complex64,
    r: f64,
    theta: f64,
    fit: bool,
) -> PyResult<PyStateVector> {
    let params = GaussianParams::new(alpha, r, theta).py()?;
    let build = |c: &fock::ModeConfig| fock::squeezed(c, &params);
    if fit {
        fit_dim(&config.0, build)
    } else {
        build(&config.0)
    }
    .py()
    .map(PyStateVector)
}

#[pyfunction]
fn superpose(states: Vec<PyStateVector>, weights: Vec<Complex64>) -> PyResult<PyStateVector> {
    let states: Vec<_> = states.into_iter().map(|s| s.0).collect();
    fock::superpose(&states, &weights).py().map(PyStateVector)
}

fn observables(names: &[String], cfg: &fock::ModeConfig) -> PyResult<Vec<Observable>> {
    let quad = quadratures(cfg).py()?;
    names
        .iter()
        .map(|n| match n.as_str() {
            "q" => Ok(Observable::new("q", quad.q.clone())),
            "p" => Ok(Observable::new("p", quad.p.clone())),
            "n" => Ok(Observable::new("n", ladder_ops(cfg).py()?.n)),
            other => Err(PyValueError::new_err(format!(
                "unknown observable {other:?}; expected q, p or n"
            ))),
        })
        .collect()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

fn from_rows(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

macro_rules! qp_relation {
    ($name:ident, $core:path) => {
        #[pyfunction]
        fn $name(state: AnyState) -> PyResult<PyRelationReport> {
            let state = state.into_state();
            let quad = quadratures(state.config()).py()?;
            $core(&state, &quad.q, &quad.p).py().map(Into::into)
        }
    };
}

qp_relation!(heisenberg, relations::heisenberg);
qp_relation!(schrodinger, relations::schrodinger);
qp_relation!(sum_ur, relations::sum_ur);

#[pyfunction]
fn canonical_sum(state: AnyState) -> PyResult<PyRelationReport> {
    relations::canonical_sum(&state.into_state())
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (state, observables = vec!["q".to_string(), "p".to_string()]))]
fn characteristic_ur(state: AnyState, observables: Vec<String>) -> PyResult<Vec<PyRelationReport>> {
    let state = state.into_state();
    let obs = self::observables(&observables, state.config())?;
    Ok(relations::characteristic_ur(&state, &obs)
        .py()?
        .into_iter()
        .map(Into::into)
        .collect())
}

#[pyfunction]
fn two_state_ur(psi: AnyState, phi: AnyState) -> PyResult<PyRelationReport> {
    relations::two_state_ur(&psi.into_state(), &phi.into_state())
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (state, observables = vec!["q".to_string(), "p".to_string()]))]
fn covariance_matrix(state: AnyState, observables: Vec<String>) -> PyResult<Vec<Vec<f64>>> {
    let state = state.into_state();
    let obs = self::observables(&observables, state.config())?;
    Ok(rows(&moments::covariance_matrix(&obs, &state).py()?.matrix))
}

#[pyfunction]
#[pyo3(signature = (state, observables = vec!["q".to_string(), "p".to_string()]))]
fn commutator_matrix(state: AnyState, observables: Vec<String>) -> PyResult<Vec<Vec<f64>>> {
    let state = state.into_state();
    let obs = self::observables(&observables, state.config())?;
    Ok(rows(&moments::commutator_matrix(&obs, &state).py()?.matrix))
}

#[pyfunction]
fn char_coeffs(matrix: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    core_char_coeffs(&CMatrix::from_nalgebra_real(&from_rows(&matrix)?)).py()
}

/// Returns `(nus, lambda)` with `nus` descending.
#[pyfunction]
fn williamson(sigma: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let sigma = CovarianceMatrix::unlabeled(from_rows(&sigma)?).py()?;
    let w = relations::williamson(&sigma).py()?;
    Ok((w.nus, rows(&w.lambda)))
}

/// Trace-class relation for `sigma` against the canonical commutator
/// matrix.
#[pyfunction]
#[pyo3(signature = (sigma, k, hbar = 1.0))]
fn trace_class_ur(sigma: Vec<Vec<f64>>, k: usize, hbar: f64) -> PyResult<PyRelationReport> {
    let sigma = CovarianceMatrix::unlabeled(from_rows(&sigma)?).py()?;
    if sigma.dim() % 2 != 0 {
        return Err(PyValueError::new_err("sigma must have even dimension"));
    }
    let comm = CommutatorMatrix::canonical(sigma.dim() / 2, hbar);
    relations::trace_class_ur(&sigma, &comm, k)
        .py()
        .map(Into::into)
}

#[pyfunction]
fn classify(state: AnyState) -> PyResult<String> {
    Ok(classify_smus(&state.into_state()).py()?.to_string())
}

fn gap_kind(kind: &str) -> PyResult<GapKind> {
    kind.parse().py()
}

#[pyfunction]
fn gap(kind: &str, config: PyModeConfig, alpha: Complex64, r: f64, theta: f64) -> PyResult<f64> {
    let params = GaussianParams::new(alpha, r, theta).py()?;
    gap_objective(gap_kind(kind)?, &params, &config.0).py()
}

type ScanRow = (Complex64, f64, f64, f64, String);

/// One `(alpha, r, theta, objective, label)` tuple per grid point;
/// failed points carry `nan` and `"error"`.
#[pyfunction]
fn scan(
    kind: &str,
    config: PyModeConfig,
    points: Vec<(Complex64, f64, f64)>,
) -> PyResult<Vec<ScanRow>> {
    let grid = points
        .into_iter()
        .map(|(a, r, t)| GaussianParams::new(a, r, t))
        .collect::<Result<Vec<_>, _>>()
        .py()?;
    Ok(scan_grid(gap_kind(kind)?, &grid, &config.0)
        .into_iter()
        .map(|res| {
            let p = res.params;
            match res.outcome {
                Ok(pt) => (p.alpha, p.r, p.theta, pt.objective, pt.label.to_string()),
                Err(_) => (p.alpha, p.r, p.theta, f64::NAN, "error".to_string()),
            }
        })
        .collect())
}

/// Degenerate parametric amplifier trajectory as a dict of columns.
#[pyfunction]
#[pyo3(signature = (state, chi = 0.2, pump_phase = 0.0, t_max = 2.0, steps = 200))]
fn evolve_dpa(
    py: Python<'_>,
    state: PyStateVector,
    chi: f64,
    pump_phase: f64,
    t_max: f64,
    steps: usize,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let times = uniform_times(t_max, steps).py()?;
    let cfg = DpaConfig::new(*state.0.config(), chi, pump_phase, times).py()?;
    let traj = moment_trajectory(&cfg, &state.0).py()?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("t", traj.times)?;
    dict.set_item("var_q", traj.var_q)?;
    dict.set_item("var_p", traj.var_p)?;
    dict.set_item("cov_qp", traj.cov_qp)?;
    dict.set_item("det_sigma", traj.det_sigma)?;
    dict.set_item("schrodinger_gap", traj.schrodinger_gap)?;
    dict.set_item("heisenberg_gap", traj.heisenberg_gap)?;
    dict.set_item("norm_drift", traj.norm_drift)?;
    Ok(dict.unbind())
}

#[pymodule]
#[pyo3(name = "uncertainty_lab")]
fn uncertainty_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyModeConfig>()?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyRelationReport>()?;
    m.add_function(wrap_pyfunction!(vacuum, m)?)?;
    m.add_function(wrap_pyfunction!(fock_state, m)?)?;
    m.add_function(wrap_pyfunction!(coherent, m)?)?;
    m.add_function(wrap_pyfunction!(squeezed, m)?)?;
    m.add_function(wrap_pyfunction!(superpose, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg, m)?)?;
    m.add_function(wrap_pyfunction!(schrodinger, m)?)?;
    m.add_function(wrap_pyfunction!(sum_ur, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_sum, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_ur, m)?)?;
    m.add_function(wrap_pyfunction!(two_state_ur, m)?)?;
    m.add_function(wrap_pyfunction!(covariance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(char_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(williamson, m)?)?;
    m.add_function(wrap_pyfunction!(trace_class_ur, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_dpa, m)?)?;
    Ok(())
}
