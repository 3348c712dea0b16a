//! Python bindings. Structured results cross the boundary as plain dicts and
//! lists built from the core crate's JSON forms.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wcdelay::equilibrium::{equilibrium, find_equilibria, SolverOpts};
use wcdelay::model::{preset, KernelKind, NetworkSpec, PRESET_NAMES};
use wcdelay::simulate::{classify_longterm, simulate as core_simulate, simulate_weak_gamma};
use wcdelay::spectrum::{band_classify as core_band, dominant_frequency as core_dominant, peak_frequency};
use wcdelay::stability::{classify as core_classify, critical_delays as core_critical, physical_critical_delays_at};
use wcdelay::sweep::{run_sweep, SweepConfig};

fn to_py(e: wcdelay::Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn kernel_kind(name: &str) -> PyResult<KernelKind> {
    name.parse::<KernelKind>().map_err(to_py)
}

/// A circuit: weights, sigmoids, inputs, mean synaptic time and delay kernel.
#[pyclass(name = "Network", module = "wcdelay_py", skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork {
    inner: NetworkSpec,
}

#[pymethods]
impl PyNetwork {
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: preset(name).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: NetworkSpec::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Set a weight by slot name (`E1I1`, `w_E2E1`, ...) or reference name (`W_SC`).
    fn set_weight(&mut self, name: &str, value: f64) -> PyResult<()> {
        self.inner.set_weight(name, value).map_err(to_py)
    }

    /// Copy with another kernel; `tau_ms` defaults to the current delay.
    #[pyo3(signature = (kind, tau_ms=None))]
    fn with_kernel(&self, kind: &str, tau_ms: Option<f64>) -> PyResult<Self> {
        let tau = tau_ms.unwrap_or(self.inner.kernel.tau_ms);
        Ok(Self {
            inner: self.inner.clone().with_kernel(kernel_kind(kind)?, tau),
        })
    }

    #[getter]
    fn tau_bar_ms(&self) -> f64 {
        self.inner.tau_bar_ms
    }

    #[getter]
    fn kernel(&self) -> (String, f64) {
        (self.inner.kernel.kind.to_string(), self.inner.kernel.tau_ms)
    }

    #[getter]
    fn weights(&self) -> std::collections::BTreeMap<String, f64> {
        self.inner.weights.named(self.inner.scheme)
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(scheme={:?}, tau_bar_ms={}, kernel={}@{} ms)",
            self.inner.scheme, self.inner.tau_bar_ms, self.inner.kernel.kind, self.inner.kernel.tau_ms
        )
    }
}

/// All equilibria, smallest norm first.
#[pyfunction]
fn equilibria<'py>(py: Python<'py>, net: &PyNetwork) -> PyResult<Bound<'py, PyAny>> {
    let all = find_equilibria(&net.inner, &SolverOpts::default()).map_err(to_py)?;
    json_to_py(py, &all)
}

/// `(alpha, beta)` at the selected equilibrium.
#[pyfunction]
#[pyo3(signature = (net, index=0))]
fn coeffs(net: &PyNetwork, index: usize) -> PyResult<(f64, f64)> {
    let eq = equilibrium(&net.inner, &SolverOpts::default(), index).map_err(to_py)?;
    Ok((eq.alpha, eq.beta))
}

/// Region and per-kernel outcome of a point in the `(alpha, beta)` plane.
#[pyfunction]
fn classify<'py>(py: Python<'py>, alpha: f64, beta: f64) -> PyResult<Bound<'py, PyAny>> {
    let c = core_classify(alpha, beta).map_err(to_py)?;
    let d = json_to_py(py, &c)?;
    d.set_item("label", c.label())?;
    Ok(d)
}

/// Scaled crossings `(omega, tau_tilde)` for a kernel at `(alpha, beta)`.
#[pyfunction]
fn critical_delays<'py>(py: Python<'py>, kernel: &str, alpha: f64, beta: f64) -> PyResult<Bound<'py, PyAny>> {
    let set = core_critical(kernel_kind(kernel)?, alpha, beta).map_err(to_py)?;
    json_to_py(py, &set)
}

/// Critical delays of a circuit in ms, with its equilibrium and region.
#[pyfunction]
#[pyo3(signature = (net, index=0))]
fn critical_delay_report<'py>(py: Python<'py>, net: &PyNetwork, index: usize) -> PyResult<Bound<'py, PyAny>> {
    let rep = physical_critical_delays_at(&net.inner, index).map_err(to_py)?;
    json_to_py(py, &rep)
}

/// Integrate the circuit with its own kernel. `init` has 4 values, or 8
/// (X then Y) for the weak-Gamma kernel. Returns `t`, `x`, optional `y` and the
/// long-run classification.
#[pyfunction]
#[pyo3(signature = (net, t_ms, init, horizon_ms, dt_ms))]
fn simulate<'py>(
    py: Python<'py>,
    net: &PyNetwork,
    t_ms: f64,
    init: Vec<f64>,
    horizon_ms: f64,
    dt_ms: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let n = &net.inner;
    let traj = py
        .detach(|| match init.len() {
            4 => core_simulate(n, t_ms, std::array::from_fn(|j| init[j]), horizon_ms, dt_ms),
            8 if n.kernel.kind == KernelKind::WeakGamma => {
                simulate_weak_gamma(n, t_ms, std::array::from_fn(|j| init[j]), horizon_ms, dt_ms)
            }
            k => Err(wcdelay::Error::Config(format!("init needs 4 values, or 8 for weak Gamma (got {k})"))),
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", &traj.t)?;
    d.set_item("x", traj.x.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    if let Some(y) = &traj.y {
        d.set_item("y", y.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    }
    if let Ok(eq) = equilibrium(n, &SolverOpts::default(), 0) {
        d.set_item("classification", classify_longterm(&traj, &eq.x_star).label())?;
    }
    d.set_item("dominant_hz", core_dominant(&traj).ok())?;
    Ok(d)
}

/// Peak frequency in Hz of a uniformly sampled signal (`dt` in ms).
#[pyfunction]
fn dominant_frequency(signal: Vec<f64>, dt_ms: f64) -> PyResult<f64> {
    peak_frequency(&signal, dt_ms).map_err(to_py)
}

#[pyfunction]
fn band_classify(f_hz: f64) -> &'static str {
    core_band(f_hz).name()
}

#[pyfunction]
fn onset_frequency(omega: f64, t_ms: f64) -> f64 {
    wcdelay::spectrum::onset_frequency(omega, t_ms)
}

/// Run a sweep from a JSON configuration and return the grid as a dict, or
/// as CSV text when `csv` is true.
#[pyfunction]
#[pyo3(signature = (config_json, csv=false))]
fn sweep<'py>(py: Python<'py>, config_json: &str, csv: bool) -> PyResult<Bound<'py, PyAny>> {
    let cfg: SweepConfig = serde_json::from_str(config_json)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let grid = py.detach(|| run_sweep(&cfg)).map_err(to_py)?;
    if csv {
        Ok(grid.to_csv_string().into_pyobject(py)?.into_any())
    } else {
        json_to_py(py, &grid)
    }
}

#[pymodule]
fn wcdelay_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add("PRESETS", PRESET_NAMES.to_vec())?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(critical_delays, m)?)?;
    m.add_function(wrap_pyfunction!(critical_delay_report, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(dominant_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(band_classify, m)?)?;
    m.add_function(wrap_pyfunction!(onset_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
