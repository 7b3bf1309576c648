//! Python bindings. Systems are described by the same JSON objects the
//! command line reads, e.g. `{"type": "exponential", "g": [0, 1], "omega": 100}`.

use oscillquad::reference::oracle_points_from_env;
use oscillquad::{
    amplitude_from_name, dense_levin_solve, oracle_integral, quadrature, Error, LevinProblem, OscillatorSystem,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SingularMatrix { .. } | Error::UnsupportedRegime(_) | Error::FallbackNeeded(_) | Error::Unsolvable(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn system(config: &str) -> PyResult<OscillatorSystem> {
    OscillatorSystem::from_json(config).map_err(to_py)
}

/// Levin quadrature of `f . w` over [-1, 1]. `method` is "fast" or "dense".
/// Returns a dict with value, residual, residual_flagged, path, nu, s and
/// wall_time.
#[pyfunction]
#[pyo3(signature = (config, amplitude = "rational_runge", nu = 128, s = 0, method = "fast"))]
fn quad<'py>(
    py: Python<'py>,
    config: &str,
    amplitude: &str,
    nu: usize,
    s: usize,
    method: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = system(config)?;
    let f = amplitude_from_name(amplitude, &sys, s).map_err(to_py)?;
    let p = LevinProblem::new(sys, f, nu, s).map_err(to_py)?;
    let r = py
        .detach(|| match method {
            "fast" => quadrature(&p),
            "dense" => dense_levin_solve(&p),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("residual", r.residual)?;
    d.set_item("residual_flagged", r.residual_flagged)?;
    d.set_item("path", r.path.as_str())?;
    d.set_item("nu", r.nu)?;
    d.set_item("s", r.s)?;
    d.set_item("wall_time", r.wall_time)?;
    Ok(d)
}

/// Reference value from a fine Clenshaw-Curtis rule. `points` defaults to
/// the OSCILLQUAD_ORACLE_POINTS setting.
#[pyfunction]
#[pyo3(signature = (config, amplitude = "rational_runge", points = None))]
fn oracle(py: Python<'_>, config: &str, amplitude: &str, points: Option<usize>) -> PyResult<Complex64> {
    let sys = system(config)?;
    let f = amplitude_from_name(amplitude, &sys, 0).map_err(to_py)?;
    let n = match points {
        Some(n) => n,
        None => oracle_points_from_env().map_err(to_py)?,
    };
    py.detach(|| oracle_integral(&sys, &f, n)).map_err(to_py)
}

#[pymodule]
fn oscillquad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(quad, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    Ok(())
}
