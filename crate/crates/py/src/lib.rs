//! Python bindings: the wrinkled-front model, its Hamiltonians, and the
//! pipeline entry points (verify / trace / render / sweep).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use wcl::config::RunConfig;
use wcl::contact::{alpha_eval, ContactPoint, TangentVector};
use wcl::pipeline;
use wcl::wrinkle;

fn to_py_err(e: wcl::WclError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Family front W_t(u, x2) = (z, x1, x2).
#[pyfunction]
fn front_family(u: f64, x2: f64, t: f64) -> (f64, f64, f64) {
    let [z, x1, x2] = wrinkle::front_family(u, x2, t);
    (z, x1, x2)
}

/// Static wrinkled embedding W(u, v) = (v..., x1, z).
#[pyfunction]
fn front_static(u: f64, v: Vec<f64>) -> Vec<f64> {
    wrinkle::front_static(&wrinkle::ParamPoint { u, v })
}

/// Legendrian lift of the family front: ((x1..xn), (y1..yn), z).
#[pyfunction]
#[pyo3(signature = (u, x2, t, n = 2))]
fn lift_family(u: f64, x2: f64, t: f64, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let p = wrinkle::lift_family(u, x2, t, n);
    (p.x, p.y, p.z)
}

/// α(X_t) = (1/3)u³ + u(t − x₂²).
#[pyfunction]
fn alpha_xt(u: f64, x2: f64, t: f64) -> f64 {
    wrinkle::alpha_xt(u, x2, t)
}

/// The deformation field X_t as ((dx1..dxn), (dy1..dyn), dz).
#[pyfunction]
#[pyo3(signature = (u, x2, t, n = 2))]
fn isotopy_field(u: f64, x2: f64, t: f64, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let w = wrinkle::isotopy_field_xt(u, x2, t, n);
    (w.dx, w.dy, w.dz)
}

/// α evaluated at a point on a tangent vector.
#[pyfunction]
fn alpha(x: Vec<f64>, y: Vec<f64>, z: f64, dx: Vec<f64>, dy: Vec<f64>, dz: f64) -> PyResult<f64> {
    let p = ContactPoint::new(x, y, z).map_err(to_py_err)?;
    let w = TangentVector { dx, dy, dz };
    alpha_eval(&p, &w).map_err(to_py_err)
}

/// Singular locus of the time-t wrinkle as a list of (u, x2) pairs.
#[pyfunction]
#[pyo3(signature = (t, n = 2))]
fn singular_locus(t: f64, n: usize) -> Vec<(f64, f64)> {
    wrinkle::singular_locus(t, n)
        .into_iter()
        .map(|q| (q.u, q.v[0]))
        .collect()
}

/// u recovered from y1 on the chosen branch.
#[pyfunction]
fn u_from_y1(y1: f64, x2: f64, t: f64, positive_branch: bool) -> PyResult<f64> {
    wrinkle::u_from_y1(y1, x2, t, positive_branch).map_err(to_py_err)
}

/// u recovered from (x1, y2).
#[pyfunction]
fn u_from_y2(x1: f64, x2: f64, y2: f64, t: f64) -> PyResult<f64> {
    wrinkle::u_from_y2(x1, x2, y2, t).map_err(to_py_err)
}

/// The capped escape-time profile g(t).
#[pyfunction]
fn g_eval(t: f64, t_half: f64, g_cap: f64) -> PyResult<f64> {
    wcl::push::EscapeProfile::new(t_half, g_cap)
        .and_then(|p| p.g_eval(t))
        .map_err(to_py_err)
}

/// Pipeline configuration: flat key/value assignments over the defaults,
/// then verify / trace / render / sweep.
#[pyclass]
struct Config {
    inner: RunConfig,
}

#[pymethods]
impl Config {
    #[new]
    fn new() -> Self {
        Self {
            inner: RunConfig::default(),
        }
    }

    /// Assign one configuration key (same keys as the config file).
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.apply_kv(key, value).map_err(to_py_err)
    }

    /// Run the full verification pipeline; returns (passed, report_text).
    fn verify(&self) -> PyResult<(bool, String)> {
        let report = pipeline::run_verify(&self.inner)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok((report.all_pass(), report.serialize()))
    }

    /// Trace the cobordism mesh; returns the plain-text export.
    fn trace(&self) -> PyResult<String> {
        let (_, text) =
            pipeline::run_trace(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(text)
    }

    /// Render the configured figures; returns [(filename, svg)].
    fn render(&self) -> PyResult<Vec<(String, String)>> {
        pipeline::run_render(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Sweep one parameter; returns the consolidated table.
    fn sweep(&self, parameter: &str, values: Vec<f64>) -> PyResult<String> {
        pipeline::run_sweep(&self.inner, parameter, &values)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pymodule]
fn wcl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(front_family, m)?)?;
    m.add_function(wrap_pyfunction!(front_static, m)?)?;
    m.add_function(wrap_pyfunction!(lift_family, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_xt, m)?)?;
    m.add_function(wrap_pyfunction!(isotopy_field, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(singular_locus, m)?)?;
    m.add_function(wrap_pyfunction!(u_from_y1, m)?)?;
    m.add_function(wrap_pyfunction!(u_from_y2, m)?)?;
    m.add_function(wrap_pyfunction!(g_eval, m)?)?;
    m.add_class::<Config>()?;
    Ok(())
}
