//! Python bindings: program execution, scoring, synthesis, and export.
//!
//! The module mirrors the toolkit's main entry points. Programs come in
//! as source text; geometry goes out as JSON documents, SVG text, or
//! plain Python dicts for the score reports.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use mbl_core::dsl;
use mbl_core::kernel::{run_source, KernelConfig, Layout};
use mbl_core::layout_json;
use mbl_core::metrics;
use mbl_core::svg;
use mbl_core::synth;
use mbl_core::topology;

fn value_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match v {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, value_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn to_py_report<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report)
        .map_err(|e| PyValueError::new_err(format!("report serialization: {e}")))?;
    value_to_py(py, &value)
}

/// An executed layout. Construct with `Layout.run(source)`.
#[pyclass(name = "Layout", module = "mbl_py")]
struct PyLayout {
    layout: Layout,
    cfg: KernelConfig,
}

#[pymethods]
impl PyLayout {
    /// Parses, checks, and executes a program.
    #[staticmethod]
    fn run(source: &str) -> PyResult<PyLayout> {
        let cfg = KernelConfig::default();
        let layout =
            run_source(source, &cfg).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyLayout { layout, cfg })
    }

    #[getter]
    fn modules(&self) -> usize {
        self.layout.alive_modules().count()
    }

    #[getter]
    fn units(&self) -> usize {
        self.layout.units.len()
    }

    #[getter]
    fn rooms(&self) -> usize {
        self.layout.rooms.len()
    }

    #[getter]
    fn doors(&self) -> usize {
        self.layout.doors.len()
    }

    #[getter]
    fn holes(&self) -> usize {
        self.layout.holes.len()
    }

    /// Canonical layout JSON document.
    #[pyo3(signature = (topology = false))]
    fn to_json(&self, topology: bool) -> String {
        layout_json::to_json(&layout_json::export_layout(&self.layout, &self.cfg, topology))
    }

    fn to_svg(&self) -> String {
        svg::render_svg(&layout_json::export_layout(&self.layout, &self.cfg, false))
    }

    /// Flat coordinate-sequence text.
    fn coordinate_seq(&self) -> String {
        synth::to_coordinate_seq(&self.layout)
    }

    /// Count-only generation instruction for this layout.
    fn skeleton(&self) -> String {
        synth::skeleton_instruction(&self.layout)
    }

    /// Adjacency, connectivity, conjoint, and containment as a dict.
    fn topology(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py_report(py, &topology::analyze(&self.layout, &self.cfg))
    }

    fn __repr__(&self) -> String {
        format!(
            "Layout(modules={}, units={}, rooms={}, doors={}, holes={})",
            self.modules(),
            self.units(),
            self.rooms(),
            self.doors(),
            self.holes()
        )
    }
}

/// Static validation: (ok, diagnostics).
#[pyfunction]
fn check(source: &str) -> (bool, Vec<String>) {
    let (ok, diags) = metrics::check_compile(source);
    (ok, diags.iter().map(|d| d.to_string()).collect())
}

/// Canonical named-argument form of a program.
#[pyfunction]
fn canonical(source: &str) -> PyResult<String> {
    let program =
        dsl::parse_program(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(dsl::canonicalize(&program))
}

/// Positional-argument form of a program.
#[pyfunction]
fn positional(source: &str) -> PyResult<String> {
    let program =
        dsl::parse_program(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(dsl::to_positional(&program))
}

/// Best-effort repair: (repaired_text, actions). Raises when the
/// program cannot be repaired without inventing content.
#[pyfunction]
fn repair(source: &str) -> PyResult<(String, Vec<String>)> {
    let report =
        dsl::repair_source(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.text, report.actions))
}

/// Verbalizes a program with the standard template bank.
#[pyfunction]
#[pyo3(signature = (source, seed = 0))]
fn describe(source: &str, seed: u64) -> PyResult<String> {
    let bank = synth::TemplateBank::standard();
    synth::describe_program(source, &bank, seed).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Generates one program from the default grammar settings.
#[pyfunction]
fn synthesize(seed: u64) -> PyResult<String> {
    synth::synthesize_code(&synth::SynthConfig::default(), &KernelConfig::default(), seed)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Builds `n` dataset records and returns them as JSONL text.
#[pyfunction]
#[pyo3(signature = (seed, n, skeleton = false))]
fn dataset_jsonl(seed: u64, n: usize, skeleton: bool) -> PyResult<String> {
    let records = synth::build_full_dataset(
        &synth::SynthConfig::default(),
        &KernelConfig::default(),
        seed,
        n,
        skeleton,
    )
    .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(synth::dataset_jsonl(&records))
}

/// Scores a predicted program against a gold program.
#[pyfunction]
fn evaluate(py: Python<'_>, pred: &str, gold: &str) -> PyResult<Py<PyAny>> {
    to_py_report(
        py,
        &metrics::evaluate_pair(pred, gold, &KernelConfig::default()),
    )
}

/// Scores coordinate-sequence text against a gold program.
#[pyfunction]
fn evaluate_coordinate(py: Python<'_>, pred_text: &str, gold: &str) -> PyResult<Py<PyAny>> {
    to_py_report(
        py,
        &metrics::evaluate_coordinate_pair(pred_text, gold, &KernelConfig::default()),
    )
}

/// Renders a layout JSON document to SVG text.
#[pyfunction]
fn render_svg(json_text: &str) -> PyResult<String> {
    let doc =
        layout_json::from_json(json_text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(svg::render_svg(&doc))
}

#[pymodule]
fn mbl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLayout>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(positional, m)?)?;
    m.add_function(wrap_pyfunction!(repair, m)?)?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(dataset_jsonl, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_coordinate, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    Ok(())
}
