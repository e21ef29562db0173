//! Python bindings. The extension module is importable as `netclust`.

use std::path::PathBuf;
use std::sync::Arc;

use ::netclust as nc;
use nc::io::{ingest, to_matrix_csv, IngestionSpec, InputFormat, ZeroPolicy};
use nc::metric::{network_distance_exact_with_cap, network_distance_upper, DEFAULT_EXACT_CAP};
use nc::properties::{run_audit, AuditOptions};
use nc::representable::{cycle_representer, parse_family, validate_family};
use nc::{MethodSpec, Property};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    netclust,
    NetclustError,
    PyValueError,
    "Raised for any library error; the message starts with an upper-case error code."
);

fn err(e: nc::Error) -> PyErr {
    NetclustError::new_err(format!("{}: {e}", e.code()))
}

/// A directed dissimilarity network.
#[pyclass(name = "Network", module = "netclust", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork(nc::Network);

#[pymethods]
impl PyNetwork {
    /// `rows` is a square list of lists with zero diagonal; labels default to x1, x2, ...
    #[new]
    #[pyo3(signature = (rows, labels=None))]
    fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let net = match labels {
            Some(l) => nc::Network::from_rows(l, rows),
            None => nc::Network::unlabeled(rows),
        };
        net.map(PyNetwork).map_err(err)
    }

    /// Reads a matrix CSV, edge list or similarity table.
    #[staticmethod]
    #[pyo3(signature = (path, format="matrix", delimiter=',', normalize=true, zero_policy="sentinel"))]
    fn from_file(
        path: PathBuf,
        format: &str,
        delimiter: char,
        normalize: bool,
        zero_policy: &str,
    ) -> PyResult<Self> {
        let format: InputFormat = format.parse().map_err(err)?;
        let mut spec = IngestionSpec::new(path, format);
        spec.delimiter = delimiter;
        spec.normalize = normalize;
        spec.zero_policy = zero_policy.parse::<ZeroPolicy>().map_err(err)?;
        ingest(&spec).map(PyNetwork).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.0.size();
        if i >= n || j >= n {
            return Err(pyo3::exceptions::PyIndexError::new_err(
                "node index out of range",
            ));
        }
        Ok(self.0.get(i, j))
    }

    fn scale(&self, alpha: f64) -> PyResult<Self> {
        self.0.scale(alpha).map(PyNetwork).map_err(err)
    }

    fn restrict(&self, labels: Vec<String>) -> PyResult<Self> {
        self.0.restrict(&labels).map(PyNetwork).map_err(err)
    }

    fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    fn to_csv(&self) -> String {
        to_matrix_csv(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(labels={:?}, rows={:?})",
            self.0.labels(),
            self.0.rows()
        )
    }
}

/// The output of a clustering method; equivalent to a dendrogram.
#[pyclass(name = "Ultrametric", module = "netclust", frozen)]
struct PyUltrametric(nc::Ultrametric);

#[pymethods]
impl PyUltrametric {
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    /// Value for a pair of labels.
    fn value(&self, a: &str, b: &str) -> PyResult<f64> {
        let net = self.0.as_network();
        let idx = |l: &str| {
            net.index_of(l)
                .ok_or_else(|| err(nc::Error::UnknownLabel(l.into())))
        };
        Ok(self.0.get(idx(a)?, idx(b)?))
    }

    /// Distinct merge heights in increasing order.
    fn resolutions(&self) -> Vec<f64> {
        self.0.resolutions()
    }

    /// Blocks of the partition at `delta`, as label lists.
    fn partition_at(&self, delta: f64) -> Vec<Vec<String>> {
        self.0.partition_at(delta).labeled(self.0.labels())
    }

    fn to_newick(&self) -> String {
        self.0.to_dendrogram().to_newick()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_dendrogram()).expect("dendrogram serializes")
    }

    fn to_csv(&self) -> String {
        to_matrix_csv(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Ultrametric({})", self.to_newick())
    }
}

/// A family of representer networks defining a representable method.
#[pyclass(name = "Family", module = "netclust", frozen)]
struct PyFamily(Arc<nc::RepresenterFamily>);

#[pymethods]
impl PyFamily {
    /// Parses the line-based family format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_family(text)
            .map(|f| PyFamily(Arc::new(f)))
            .map_err(err)
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        nc::RepresenterFamily::from_file(&path)
            .map(|f| PyFamily(Arc::new(f)))
            .map_err(err)
    }

    /// Unit-weight directed cycles of every length from 2 to `max_len`.
    #[staticmethod]
    fn cycles(max_len: usize) -> PyResult<Self> {
        nc::RepresenterFamily::cycles(max_len)
            .map(|f| PyFamily(Arc::new(f)))
            .map_err(err)
    }

    /// A single directed cycle with the given forward and optional backward weights.
    #[staticmethod]
    #[pyo3(signature = (k, forward=1.0, backward=None))]
    fn cycle(k: usize, forward: f64, backward: Option<f64>) -> PyResult<Self> {
        let rep = cycle_representer(k, forward, backward).map_err(err)?;
        validate_family(vec![rep])
            .map(|f| PyFamily(Arc::new(f)))
            .map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn __len__(&self) -> usize {
        self.0.members().len()
    }

    fn separation(&self) -> f64 {
        self.0.separation()
    }

    fn lipschitz_constant(&self) -> f64 {
        self.0.lipschitz_constant()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }
}

fn method_of(method: &Bound<'_, PyAny>) -> PyResult<MethodSpec> {
    if let Ok(f) = method.cast::<PyFamily>() {
        return Ok(MethodSpec::Representable(f.get().0.clone()));
    }
    let text: String = method.extract()?;
    MethodSpec::parse(&text).map_err(err)
}

/// Clusters `net` with a method string (`reciprocal`, `nonreciprocal`,
/// `semi:<t>`, `graft:<beta>`, `representable:<file>`) or a `Family`.
#[pyfunction]
fn cluster(py: Python<'_>, net: &PyNetwork, method: &Bound<'_, PyAny>) -> PyResult<PyUltrametric> {
    let spec = method_of(method)?;
    let net = net.0.clone();
    py.detach(move || spec.run(&net))
        .map(PyUltrametric)
        .map_err(err)
}

#[pyfunction]
fn reciprocal(net: &PyNetwork) -> PyUltrametric {
    PyUltrametric(nc::methods::reciprocal(&net.0))
}

#[pyfunction]
fn nonreciprocal(net: &PyNetwork) -> PyUltrametric {
    PyUltrametric(nc::methods::nonreciprocal(&net.0))
}

#[pyfunction]
fn semi_reciprocal(net: &PyNetwork, t: usize) -> PyResult<PyUltrametric> {
    nc::methods::semi_reciprocal(&net.0, t)
        .map(PyUltrametric)
        .map_err(err)
}

#[pyfunction]
fn grafting(net: &PyNetwork, beta: f64) -> PyResult<PyUltrametric> {
    nc::methods::grafting(&net.0, beta)
        .map(PyUltrametric)
        .map_err(err)
}

/// Audits one property; returns the report as a dict with `verdict`,
/// `probes` and, on violation, `witness`.
#[pyfunction]
#[pyo3(signature = (property, method, net, seed=0, probes=25, cap=DEFAULT_EXACT_CAP))]
fn audit<'py>(
    py: Python<'py>,
    property: &str,
    method: &Bound<'py, PyAny>,
    net: &PyNetwork,
    seed: u64,
    probes: usize,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let property: Property = property.parse().map_err(err)?;
    let spec = method_of(method)?;
    let opts = AuditOptions {
        seed,
        probes,
        cap,
        ..AuditOptions::default()
    };
    let net = net.0.clone();
    let report = py
        .detach(move || run_audit(property, &spec, &net, &opts))
        .map_err(err)?;
    let json = py.import("json")?;
    Ok(json
        .call_method1("loads", (report.to_json(),))?
        .cast_into::<PyDict>()?)
}

/// Network distance: exact within `cap` nodes, otherwise pass `exact=False`
/// for a seeded upper bound.
#[pyfunction]
#[pyo3(signature = (x, y, exact=true, trials=50, seed=0, cap=DEFAULT_EXACT_CAP))]
fn distance(
    py: Python<'_>,
    x: &PyNetwork,
    y: &PyNetwork,
    exact: bool,
    trials: usize,
    seed: u64,
    cap: usize,
) -> PyResult<f64> {
    let (x, y) = (x.0.clone(), y.0.clone());
    py.detach(move || {
        if exact {
            network_distance_exact_with_cap(&x, &y, cap)
        } else {
            network_distance_upper(&x, &y, trials, seed)
        }
    })
    .map_err(err)
}

#[pymodule]
#[pyo3(name = "netclust")]
fn netclust_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NetclustError", m.py().get_type::<NetclustError>())?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyUltrametric>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(cluster, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocal, m)?)?;
    m.add_function(wrap_pyfunction!(nonreciprocal, m)?)?;
    m.add_function(wrap_pyfunction!(semi_reciprocal, m)?)?;
    m.add_function(wrap_pyfunction!(grafting, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    Ok(())
}
