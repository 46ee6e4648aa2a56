//! Python bindings for the halflight engine.
//!
//! The surface mirrors the CLI: specs and reports travel as JSON
//! strings (one parser surface on both sides of the boundary), sample
//! points and frames as plain lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::wrap_pyfunction;

use halflight::error::FrameError;
use halflight::framing::{build_frame, ImmersionSpec};
use halflight::report::{run_report, Suite};
use halflight::sampling::{halton_points, random_points};
use halflight::tolerances::Tolerances;
use halflight::{classify, fixtures, induced_objects};

fn frame_err(e: FrameError) -> PyErr {
    match e {
        FrameError::InvalidSpec(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn load_spec(spec_json: &str) -> PyResult<ImmersionSpec> {
    ImmersionSpec::from_json(spec_json).map_err(frame_err)
}

/// Names of the built-in fixtures.
#[pyfunction]
fn fixture_names() -> Vec<String> {
    fixtures::names().into_iter().map(String::from).collect()
}

/// A fixture's immersion spec as a JSON string.
#[pyfunction]
fn fixture_spec(name: &str) -> PyResult<String> {
    let fixture = fixtures::get(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))?;
    Ok(fixture.spec.to_json())
}

/// A fixture's curated sample points.
#[pyfunction]
fn fixture_points(name: &str) -> PyResult<Vec<Vec<f64>>> {
    let fixture = fixtures::get(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))?;
    Ok(fixture.points)
}

/// Deterministic low-discrepancy points in the spec's domain box, or
/// seeded-uniform points when `seed` is given.
#[pyfunction]
#[pyo3(signature = (spec_json, count, seed=None))]
fn sample_points(spec_json: &str, count: usize, seed: Option<u64>) -> PyResult<Vec<Vec<f64>>> {
    let spec = load_spec(spec_json)?;
    Ok(match seed {
        Some(s) => random_points(&spec.domain, count, s),
        None => halton_points(&spec.domain, count, 0),
    })
}

/// Run the residual suites and the classifier; returns the report as a
/// JSON string. `suites` defaults to all of frames, induced, curvature,
/// cartan, classify; `tol` overrides every tier uniformly.
#[pyfunction]
#[pyo3(signature = (spec_json, points, suites=None, tol=None))]
fn analyze(
    spec_json: &str,
    points: Vec<Vec<f64>>,
    suites: Option<Vec<String>>,
    tol: Option<f64>,
) -> PyResult<String> {
    let spec = load_spec(spec_json)?;
    let suites = match suites {
        None => Suite::all(),
        Some(names) => {
            let mut list = Vec::new();
            for name in &names {
                let suite = Suite::parse(name).ok_or_else(|| {
                    PyValueError::new_err(format!("unknown suite `{name}`"))
                })?;
                if !list.contains(&suite) {
                    list.push(suite);
                }
            }
            list
        }
    };
    let tols = match tol {
        Some(t) => Tolerances::uniform(t),
        None => Tolerances::default(),
    };
    let report = run_report(&spec, &points, &suites, &tols).map_err(frame_err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Classify the immersion at the given points; returns the sampled
/// classification as a JSON string.
#[pyfunction]
fn classify_spec(spec_json: &str, points: Vec<Vec<f64>>) -> PyResult<String> {
    let spec = load_spec(spec_json)?;
    let cls = classify(&spec, &points).map_err(frame_err)?;
    serde_json::to_string(&cls).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// The half-lightlike frame at one chart point: radical, screen,
/// co-screen, transversal (ambient components), the induced degenerate
/// metric, and the second fundamental forms, as a JSON string.
#[pyfunction]
fn frame_at(spec_json: &str, point: Vec<f64>) -> PyResult<String> {
    let spec = load_spec(spec_json)?;
    let fp = build_frame(&spec, &point).map_err(frame_err)?;
    let objs = induced_objects(&spec, &fp).map_err(frame_err)?;
    let vec_of = |v: &nalgebra::DVector<f64>| -> Vec<f64> { v.iter().copied().collect() };
    let mat_of = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect()
    };
    let doc = serde_json::json!({
        "point": fp.u,
        "immersion": vec_of(&fp.jet.value),
        "metric": mat_of(&fp.gram),
        "radical": vec_of(&fp.xi),
        "screen": fp.screen.iter().map(&vec_of).collect::<Vec<_>>(),
        "coscreen": vec_of(&fp.coscreen),
        "transversal": vec_of(&fp.transversal),
        "eta": vec_of(&fp.eta),
        "b": mat_of(&objs.alg.b),
        "d": mat_of(&objs.alg.d),
        "tau": vec_of(&objs.trans.tau),
        "rho": vec_of(&objs.trans.rho),
        "phi_form": vec_of(&objs.trans.phi),
    });
    Ok(doc.to_string())
}

#[pymodule]
fn halflight_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_spec, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_points, m)?)?;
    m.add_function(wrap_pyfunction!(sample_points, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(classify_spec, m)?)?;
    m.add_function(wrap_pyfunction!(frame_at, m)?)?;
    Ok(())
}
