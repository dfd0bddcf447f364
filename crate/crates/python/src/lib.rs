//! Python bindings: parse and write logs, detect dynamic attributes, build
//! DOCEL logs, run the generators and score predictions.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use docelkit::detect::{self, DEFAULT_RESERVED_NAMES, DEFAULT_TAU};
use docelkit::generate::{self as gen, FlattenStyle, O2DParams, ShipParams};
use docelkit::similarity::EmbeddingSimilarity;
use docelkit::{docel_io, evaluate as ev, model, ocel_io};

create_exception!(docelkit, DocelError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    DocelError::new_err(e.to_string())
}

fn value_to_py(py: Python<'_>, v: &model::AttributeValue) -> PyResult<Py<PyAny>> {
    use model::AttributeValue as V;
    match v {
        V::String(s) => s.into_py_any(py),
        V::Integer(i) => i.into_py_any(py),
        V::Real(x) => x.into_py_any(py),
        V::Boolean(b) => b.into_py_any(py),
        V::Timestamp(ts) => model::format_timestamp(ts).into_py_any(py),
    }
}

fn attrs_to_py<'py>(
    py: Python<'py>,
    attrs: &BTreeMap<String, model::AttributeValue>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, v) in attrs {
        d.set_item(k, value_to_py(py, v)?)?;
    }
    Ok(d)
}

fn events_to_py<'py>(py: Python<'py>, events: &[model::Event]) -> PyResult<Bound<'py, PyList>> {
    let out = PyList::empty(py);
    for e in events {
        let d = PyDict::new(py);
        d.set_item("eid", &e.eid)?;
        d.set_item("activity", &e.activity)?;
        d.set_item("timestamp", model::format_timestamp(&e.timestamp))?;
        d.set_item("objects", e.objects.iter().collect::<Vec<_>>())?;
        d.set_item("attributes", attrs_to_py(py, &e.attributes)?)?;
        out.append(d)?;
    }
    Ok(out)
}

fn objects_to_py<'py>(
    py: Python<'py>,
    objects: &BTreeMap<String, model::ObjectInstance>,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for o in objects.values() {
        let d = PyDict::new(py);
        d.set_item("type", &o.object_type)?;
        d.set_item("attributes", attrs_to_py(py, &o.attributes)?)?;
        out.set_item(&o.oid, d)?;
    }
    Ok(out)
}

/// Serializes a Python object with the stdlib `json` module.
fn py_to_json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

/// Converts a serde value to Python objects via the stdlib `json` module.
fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A flat object-centric event log.
#[pyclass(name = "OcelLog", module = "docelkit", skip_from_py_object)]
#[derive(Clone)]
struct PyOcelLog {
    inner: model::OcelLog,
}

#[pymethods]
impl PyOcelLog {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ocel_io::parse_ocel_json(text.as_bytes()).map_err(err)?;
        Ok(PyOcelLog { inner })
    }

    #[staticmethod]
    fn from_csv(events: &str, objects: &str) -> PyResult<Self> {
        let inner = ocel_io::parse_ocel_csv(events.as_bytes(), objects.as_bytes()).map_err(err)?;
        Ok(PyOcelLog { inner })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path).map_err(err)?;
        let inner = ocel_io::parse_ocel_json(&bytes).map_err(err)?;
        Ok(PyOcelLog { inner })
    }

    /// Running example used throughout the docs and tests.
    #[staticmethod]
    fn running_example() -> Self {
        PyOcelLog {
            inner: docelkit::fixtures::running_example(),
        }
    }

    fn to_json(&self) -> String {
        String::from_utf8(ocel_io::write_ocel_json(&self.inner)).expect("writer emits UTF-8")
    }

    /// Returns `(events_csv, objects_csv)`.
    fn to_csv(&self) -> PyResult<(String, String)> {
        let (e, o) = ocel_io::write_ocel_csv(&self.inner).map_err(err)?;
        Ok((
            String::from_utf8(e).map_err(err)?,
            String::from_utf8(o).map_err(err)?,
        ))
    }

    fn validate(&self) -> Vec<String> {
        model::validate_ocel(&self.inner)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[getter]
    fn object_types(&self) -> Vec<String> {
        self.inner.object_types.iter().cloned().collect()
    }

    #[getter]
    fn attribute_names(&self) -> Vec<String> {
        self.inner.event_attr_names.iter().cloned().collect()
    }

    fn events<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        events_to_py(py, &self.inner.events)
    }

    fn objects<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        objects_to_py(py, &self.inner.objects)
    }

    #[getter]
    fn num_events(&self) -> usize {
        self.inner.events.len()
    }

    #[getter]
    fn num_objects(&self) -> usize {
        self.inner.objects.len()
    }

    fn __len__(&self) -> usize {
        self.inner.events.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "OcelLog(events={}, objects={}, types={:?})",
            self.inner.events.len(),
            self.inner.objects.len(),
            self.inner.object_types
        )
    }
}

/// A log with dynamic object attributes stored in per-attribute tables.
#[pyclass(name = "DocelLog", module = "docelkit", skip_from_py_object)]
#[derive(Clone)]
struct PyDocelLog {
    inner: model::DocelLog,
}

#[pymethods]
impl PyDocelLog {
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let inner = docel_io::read_docel(&path).map_err(err)?;
        Ok(PyDocelLog { inner })
    }

    /// Writes the bundle directory and returns its summary.
    fn write<'py>(&self, py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyAny>> {
        let summary = docel_io::write_docel(&self.inner, &path).map_err(err)?;
        json_to_py(py, &summary)
    }

    /// Attribute name -> object type.
    #[getter]
    fn registry(&self) -> BTreeMap<String, String> {
        self.inner.registry()
    }

    /// Rows of one dynamic table as `(vid, oid, eid, value)` tuples.
    fn table(&self, py: Python<'_>, attr: &str) -> PyResult<Vec<(String, String, String, Py<PyAny>)>> {
        let table = self
            .inner
            .dynamic_tables
            .get(attr)
            .ok_or_else(|| pyo3::exceptions::PyKeyError::new_err(attr.to_string()))?;
        table
            .rows
            .iter()
            .map(|r| {
                Ok((
                    r.vid.clone(),
                    r.oid.clone(),
                    r.eid.clone(),
                    value_to_py(py, &r.value)?,
                ))
            })
            .collect()
    }

    fn events<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        events_to_py(py, &self.inner.events)
    }

    fn objects<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        objects_to_py(py, &self.inner.objects)
    }

    /// Back to a flat log; `sparse` writes values only where they change.
    #[pyo3(signature = (sparse = false))]
    fn flatten(&self, sparse: bool) -> PyOcelLog {
        let style = if sparse {
            FlattenStyle::Sparse
        } else {
            FlattenStyle::Repeat
        };
        PyOcelLog {
            inner: gen::flatten_to_ocel_with(&self.inner, style),
        }
    }

    fn validate(&self) -> Vec<String> {
        model::validate_docel(&self.inner)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[getter]
    fn num_events(&self) -> usize {
        self.inner.events.len()
    }

    #[getter]
    fn num_objects(&self) -> usize {
        self.inner.objects.len()
    }

    #[getter]
    fn row_count(&self) -> usize {
        self.inner.row_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "DocelLog(events={}, objects={}, dynamic={:?})",
            self.inner.events.len(),
            self.inner.objects.len(),
            self.inner.registry()
        )
    }
}

#[pyclass(name = "Match", module = "docelkit", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyMatch {
    inner: model::Match,
}

#[pymethods]
impl PyMatch {
    #[getter]
    fn attr(&self) -> &str {
        &self.inner.attr
    }

    #[getter]
    fn object_type(&self) -> &str {
        &self.inner.object_type
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Match({:?} -> {:?}, {})",
            self.inner.attr, self.inner.object_type, self.inner.method
        )
    }
}

fn wrap_matches(matches: Vec<model::Match>) -> Vec<PyMatch> {
    matches.into_iter().map(|inner| PyMatch { inner }).collect()
}

/// Detector settings. `reserved=None` keeps the default reserved names.
#[pyclass(name = "DetectorConfig", module = "docelkit", skip_from_py_object)]
#[derive(Clone)]
struct PyDetectorConfig {
    inner: detect::DetectorConfig,
}

#[pymethods]
impl PyDetectorConfig {
    #[new]
    #[pyo3(signature = (tau = DEFAULT_TAU, reserved = None, name_matching = true, embeddings = None))]
    fn new(
        tau: f64,
        reserved: Option<Vec<String>>,
        name_matching: bool,
        embeddings: Option<PathBuf>,
    ) -> PyResult<Self> {
        if !(tau >= 0.0) {
            return Err(err(format!("tau must be non-negative, got {tau}")));
        }
        let mut inner = detect::DetectorConfig {
            tau,
            name_matching_enabled: name_matching,
            ..Default::default()
        };
        if let Some(r) = reserved {
            inner = inner.with_reserved(r);
        }
        if let Some(path) = embeddings {
            inner.similarity = Arc::new(EmbeddingSimilarity::from_file(&path).map_err(err)?);
        }
        Ok(PyDetectorConfig { inner })
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[getter]
    fn reserved(&self) -> Vec<String> {
        self.inner.reserved_names.iter().cloned().collect()
    }

    #[getter]
    fn name_matching(&self) -> bool {
        self.inner.name_matching_enabled
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectorConfig(tau={}, reserved={:?}, name_matching={})",
            self.inner.tau, self.inner.reserved_names, self.inner.name_matching_enabled
        )
    }
}

fn config_or_default(config: Option<&PyDetectorConfig>) -> detect::DetectorConfig {
    config.map(|c| c.inner.clone()).unwrap_or_default()
}

#[pyfunction]
#[pyo3(signature = (log, config = None))]
fn detect_matches(log: &PyOcelLog, config: Option<&PyDetectorConfig>) -> PyResult<Vec<PyMatch>> {
    let cfg = config_or_default(config);
    Ok(wrap_matches(detect::detect_matches(&log.inner, &cfg).map_err(err)?))
}

/// Per-attribute detection trace as plain Python data.
#[pyfunction]
#[pyo3(signature = (log, config = None))]
fn detection_report<'py>(
    py: Python<'py>,
    log: &PyOcelLog,
    config: Option<&PyDetectorConfig>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config_or_default(config);
    let detection = detect::detect(&log.inner, &cfg).map_err(err)?;
    json_to_py(py, &detection)
}

#[pyfunction]
fn transform(log: &PyOcelLog, matches: Vec<PyMatch>) -> PyResult<PyDocelLog> {
    let matches: Vec<model::Match> = matches.into_iter().map(|m| m.inner).collect();
    let inner = docelkit::transform(&log.inner, &matches).map_err(err)?;
    Ok(PyDocelLog { inner })
}

/// Detection followed by transformation.
#[pyfunction]
#[pyo3(signature = (log, config = None))]
fn convert(log: &PyOcelLog, config: Option<&PyDetectorConfig>) -> PyResult<(PyDocelLog, Vec<PyMatch>)> {
    let cfg = config_or_default(config);
    let (inner, matches) = docelkit::convert(&log.inner, &cfg).map_err(err)?;
    Ok((PyDocelLog { inner }, wrap_matches(matches)))
}

/// Runs a reference generator. `params` takes the generator's parameter
/// names; `num_orders` and `seed` override it.
#[pyfunction]
#[pyo3(signature = (process, num_orders = None, seed = None, params = None))]
fn generate(
    process: &str,
    num_orders: Option<usize>,
    seed: Option<u64>,
    params: Option<&Bound<'_, PyDict>>,
) -> PyResult<PyDocelLog> {
    let text = match params {
        Some(d) => py_to_json_text(d.as_any())?,
        None => "{}".to_string(),
    };
    let inner = match process {
        "order-to-delivery" => {
            let mut p: O2DParams = serde_json::from_str(&text).map_err(err)?;
            if let Some(n) = num_orders {
                p.num_orders = n;
            }
            if let Some(s) = seed {
                p.seed = s;
            }
            gen::generate_order_to_delivery(&p).map_err(err)?
        }
        "shipping-method" => {
            let mut p: ShipParams = serde_json::from_str(&text).map_err(err)?;
            if let Some(n) = num_orders {
                p.num_orders = n;
            }
            if let Some(s) = seed {
                p.seed = s;
            }
            gen::generate_shipping_method(&p).map_err(err)?
        }
        other => {
            return Err(err(format!(
                "unknown process `{other}` (expected `order-to-delivery` or `shipping-method`)"
            )))
        }
    };
    Ok(PyDocelLog { inner })
}

/// Matching and assignment reports as a list of dicts. `mode` is `both`,
/// `propagate-fp` or `no-propagate-fp`.
#[pyfunction]
#[pyo3(signature = (gold, pred, mode = "both"))]
fn evaluate<'py>(
    py: Python<'py>,
    gold: &PyDocelLog,
    pred: &PyDocelLog,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let (propagate, no_propagate) = match mode {
        "both" => (true, true),
        "propagate-fp" => (true, false),
        "no-propagate-fp" => (false, true),
        other => return Err(err(format!("unknown mode `{other}`"))),
    };
    let mut reports = vec![ev::eval_matching(
        &gold.inner,
        &ev::registry_matches(&pred.inner),
    )];
    if propagate {
        reports.push(ev::eval_assignment(&gold.inner, &pred.inner, true));
    }
    if no_propagate {
        reports.push(ev::eval_assignment(&gold.inner, &pred.inner, false));
    }
    json_to_py(py, &reports)
}

#[pyfunction]
fn similarity(attr: &str, object_type: &str) -> PyResult<f64> {
    use docelkit::similarity::{LexicalSimilarity, SimilarityProvider};
    LexicalSimilarity.similarity(attr, object_type).map_err(err)
}

#[pymodule]
#[pyo3(name = "docelkit")]
fn docelkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DocelError", m.py().get_type::<DocelError>())?;
    m.add("DEFAULT_TAU", DEFAULT_TAU)?;
    m.add("DEFAULT_RESERVED_NAMES", DEFAULT_RESERVED_NAMES.to_vec())?;
    m.add_class::<PyOcelLog>()?;
    m.add_class::<PyDocelLog>()?;
    m.add_class::<PyMatch>()?;
    m.add_class::<PyDetectorConfig>()?;
    m.add_function(wrap_pyfunction!(detect_matches, m)?)?;
    m.add_function(wrap_pyfunction!(detection_report, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    Ok(())
}
