//! Python bindings: `import qdarwin`.
//!
//! Entropies are returned in nats and curve values in bits, as in the Rust
//! crate. Every library error surfaces as `ValueError`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qdarwin_core::branch as br;
use qdarwin_core::ensembles::{self as ens, EmpiricalMode};
use qdarwin_core::haar::{self, RngSeed, DEFAULT_SAMPLES, DEFAULT_SUBSET_BUDGET};
use qdarwin_core::qkernel::{self, PureState, QubitMask};
use qdarwin_core::redundancy as red;
use qdarwin_core::PipCurve;

fn value_error(e: qdarwin_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn state(amplitudes: Vec<Complex64>) -> PyResult<PureState> {
    PureState::new(amplitudes).map_err(value_error)
}

/// Averaged partial information curve, Ī(m) in bits for m = 0..=N.
#[pyclass(name = "PipCurve", module = "qdarwin", frozen)]
pub struct PyPipCurve {
    inner: PipCurve,
}

#[pymethods]
impl PyPipCurve {
    #[getter]
    fn n_env(&self) -> usize {
        self.inner.n_env
    }

    /// One of "analytic", "quadrature", "enumeration", "montecarlo".
    #[getter]
    fn provenance(&self) -> &'static str {
        use qdarwin_core::Provenance::*;
        match self.inner.provenance {
            Analytic => "analytic",
            Quadrature => "quadrature",
            Enumeration => "enumeration",
            MonteCarlo => "montecarlo",
        }
    }

    #[getter]
    fn m(&self) -> Vec<usize> {
        self.inner.points.iter().map(|p| p.m).collect()
    }

    #[getter]
    fn mean_bits(&self) -> Vec<f64> {
        self.inner.values()
    }

    #[getter]
    fn stderr_bits(&self) -> Vec<Option<f64>> {
        self.inner.points.iter().map(|p| p.stderr_bits).collect()
    }

    #[getter]
    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn antisymmetry_defect(&self) -> f64 {
        self.inner.antisymmetry_defect()
    }

    fn rescaled_by_total(&self) -> Vec<f64> {
        self.inner.rescaled_by_total()
    }

    fn __len__(&self) -> usize {
        self.inner.points.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PipCurve(n_env={}, provenance='{}', total={:.6})",
            self.inner.n_env,
            self.provenance(),
            self.inner.total()
        )
    }
}

impl From<PipCurve> for PyPipCurve {
    fn from(inner: PipCurve) -> Self {
        PyPipCurve { inner }
    }
}

/// Purity `p0` of the decohered system and one d-factor per environment.
#[pyclass(name = "DecoherenceProfile", module = "qdarwin", frozen)]
pub struct PyDecoherenceProfile {
    inner: br::DecoherenceProfile,
}

#[pymethods]
impl PyDecoherenceProfile {
    #[new]
    #[pyo3(signature = (d, p0 = 0.5))]
    fn new(d: Vec<f64>, p0: f64) -> PyResult<Self> {
        let inner = br::DecoherenceProfile::new(p0, d).map_err(value_error)?;
        Ok(PyDecoherenceProfile { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n_env, d0, p0 = 0.5))]
    fn unimodal(n_env: usize, d0: f64, p0: f64) -> PyResult<Self> {
        let inner = br::DecoherenceProfile::unimodal(n_env, d0, p0).map_err(value_error)?;
        Ok(PyDecoherenceProfile { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n_env, n_useful, d0, p0 = 0.5))]
    fn bimodal(n_env: usize, n_useful: usize, d0: f64, p0: f64) -> PyResult<Self> {
        let inner =
            br::DecoherenceProfile::bimodal(n_env, n_useful, d0, p0).map_err(value_error)?;
        Ok(PyDecoherenceProfile { inner })
    }

    #[getter]
    fn p0(&self) -> f64 {
        self.inner.p0()
    }

    #[getter]
    fn d(&self) -> Vec<f64> {
        self.inner.d().to_vec()
    }

    #[getter]
    fn n_env(&self) -> usize {
        self.inner.n_env()
    }

    #[getter]
    fn d_total(&self) -> f64 {
        self.inner.d_total()
    }

    /// I(S:F) in nats for the environments at register indices `envs` (1..=N).
    fn subset_mutual_information(&self, envs: Vec<usize>) -> PyResult<f64> {
        br::subset_mutual_information(&self.inner, QubitMask::from_indices(envs))
            .map(|e| e.nats())
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "DecoherenceProfile(n_env={}, p0={}, d_total={})",
            self.inner.n_env(),
            self.inner.p0(),
            self.inner.d_total()
        )
    }
}

#[pyclass(name = "RedundancyReport", module = "qdarwin", frozen, get_all)]
pub struct PyRedundancyReport {
    delta: f64,
    d_r: f64,
    r_infdiv: f64,
    r_partition: usize,
    /// Witness parts as register indices (environments are 1..=N).
    parts: Vec<Vec<usize>>,
}

#[pymethods]
impl PyRedundancyReport {
    /// Parts count minus one.
    fn redundancy(&self) -> i64 {
        self.r_partition as i64 - 1
    }

    fn __repr__(&self) -> String {
        format!(
            "RedundancyReport(delta={}, d_r={}, r_infdiv={}, r_partition={})",
            self.delta, self.d_r, self.r_infdiv, self.r_partition
        )
    }
}

/// Haar-random pure state on `n_qubits`, as a list of complex amplitudes.
#[pyfunction]
#[pyo3(signature = (n_qubits, seed, stream = 0))]
fn haar_random_pure_state(n_qubits: usize, seed: u64, stream: u64) -> PyResult<Vec<Complex64>> {
    haar::haar_random_pure_state(n_qubits, RngSeed(seed), stream)
        .map(|s| s.amplitudes().to_vec())
        .map_err(value_error)
}

/// Entropy in nats of the qubits `keep` of a pure state.
#[pyfunction]
fn marginal_entropy(amplitudes: Vec<Complex64>, keep: Vec<usize>) -> PyResult<f64> {
    qkernel::marginal_entropy(&state(amplitudes)?, QubitMask::from_indices(keep))
        .map(|e| e.nats())
        .map_err(value_error)
}

/// Quantum mutual information in nats between two disjoint qubit sets.
#[pyfunction]
fn mutual_information(amplitudes: Vec<Complex64>, a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    qkernel::mutual_information(
        &state(amplitudes)?,
        QubitMask::from_indices(a),
        QubitMask::from_indices(b),
    )
    .map(|e| e.nats())
    .map_err(value_error)
}

/// Mean entanglement entropy in nats of an `m_dim` × `n_dim` Haar state.
#[pyfunction]
fn page_mean_entropy(m_dim: u64, n_dim: u64) -> PyResult<f64> {
    haar::page_mean_entropy(m_dim, n_dim)
        .map(|e| e.nats())
        .map_err(value_error)
}

#[pyfunction]
fn haar_average_pip(n_env: usize) -> PyResult<PyPipCurve> {
    haar::haar_average_pip(n_env)
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n_env, samples = DEFAULT_SAMPLES, seed = 0, subset_budget = DEFAULT_SUBSET_BUDGET))]
fn sampled_average_pip(
    py: Python<'_>,
    n_env: usize,
    samples: usize,
    seed: u64,
    subset_budget: usize,
) -> PyResult<PyPipCurve> {
    py.detach(|| haar::sampled_average_pip(n_env, samples, RngSeed(seed), subset_budget))
        .map(Into::into)
        .map_err(value_error)
}

/// H(P0, d) in nats.
#[pyfunction]
fn entropy_h(p0: f64, d: f64) -> PyResult<f64> {
    br::entropy_h(p0, d).map(|e| e.nats()).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n_env, d0, p0 = 0.5))]
fn unimodal_pip(n_env: usize, d0: f64, p0: f64) -> PyResult<PyPipCurve> {
    ens::unimodal_pip(n_env, d0, p0)
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n_total, n_useful, d0, p0 = 0.5))]
fn bimodal_average_pip(n_total: usize, n_useful: usize, d0: f64, p0: f64) -> PyResult<PyPipCurve> {
    ens::bimodal_average_pip(n_total, n_useful, d0, p0)
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
fn poisson_average_pip(n_env: usize) -> PyResult<PyPipCurve> {
    ens::poisson_average_pip(n_env)
        .map(Into::into)
        .map_err(value_error)
}

/// Mean entropy in nats of a qubit decohered by `m` Bloch-uniform environments.
#[pyfunction]
fn poisson_mean_entropy(m: usize) -> f64 {
    ens::poisson_mean_entropy(m).nats()
}

/// Exact enumeration, or Monte Carlo over subsets when `samples` is given.
#[pyfunction]
#[pyo3(signature = (profile, samples = None, seed = 0))]
fn empirical_average_pip(
    py: Python<'_>,
    profile: &PyDecoherenceProfile,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<PyPipCurve> {
    let mode = match samples {
        Some(s) => EmpiricalMode::monte_carlo(s, seed),
        None => EmpiricalMode::Exact,
    };
    let inner = &profile.inner;
    py.detach(|| ens::empirical_average_pip(inner, mode))
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
fn critical_d(p0: f64, d_total: f64, delta: f64) -> PyResult<f64> {
    red::critical_d(p0, d_total, delta).map_err(value_error)
}

#[pyfunction]
fn redundancy_infdiv(profile: &PyDecoherenceProfile, delta: f64) -> PyResult<f64> {
    red::redundancy_infdiv(&profile.inner, delta).map_err(value_error)
}

#[pyfunction]
fn redundancy_partition(
    profile: &PyDecoherenceProfile,
    delta: f64,
) -> PyResult<PyRedundancyReport> {
    let r = red::redundancy_partition(&profile.inner, delta).map_err(value_error)?;
    Ok(PyRedundancyReport {
        delta: r.delta,
        d_r: r.d_r,
        r_infdiv: r.r_infdiv,
        r_partition: r.r_partition,
        parts: r.parts,
    })
}

#[pymodule]
pub fn qdarwin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPipCurve>()?;
    m.add_class::<PyDecoherenceProfile>()?;
    m.add_class::<PyRedundancyReport>()?;
    m.add_function(wrap_pyfunction!(haar_random_pure_state, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(page_mean_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(haar_average_pip, m)?)?;
    m.add_function(wrap_pyfunction!(sampled_average_pip, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_h, m)?)?;
    m.add_function(wrap_pyfunction!(unimodal_pip, m)?)?;
    m.add_function(wrap_pyfunction!(bimodal_average_pip, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_average_pip, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_mean_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_average_pip, m)?)?;
    m.add_function(wrap_pyfunction!(critical_d, m)?)?;
    m.add_function(wrap_pyfunction!(redundancy_infdiv, m)?)?;
    m.add_function(wrap_pyfunction!(redundancy_partition, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
