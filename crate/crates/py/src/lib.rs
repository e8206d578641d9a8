//! Python bindings: `import agentgc`.

use std::path::PathBuf;

use agentgc_core::agent::{self, Agent, AgentOptions, Logger};
use agentgc_core::cognition::{self, VectorDatabase};
use agentgc_core::config::{self as core_config, Mode};
use agentgc_core::metrics::{self, MetricSample};
use agentgc_core::pipeline::{self, Archive};
use agentgc_core::skmer;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode_from(code: u8) -> PyResult<Mode> {
    Mode::try_from(code).map_err(value_err)
}

/// Compression parameters. `mode`: 0 = ratio, 1 = throughput, 2 = balanced.
#[pyclass(name = "CompressionConfig", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: core_config::CompressionConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (context=None, embed_dim=None, hidden_dim=None, learning_rate=None, batch=None, mode=None, seed=None))]
    fn new(
        context: Option<usize>,
        embed_dim: Option<usize>,
        hidden_dim: Option<usize>,
        learning_rate: Option<f32>,
        batch: Option<usize>,
        mode: Option<u8>,
        seed: Option<u64>,
    ) -> PyResult<Self> {
        let mut c = core_config::CompressionConfig::default();
        c.context = context.unwrap_or(c.context);
        c.embed_dim = embed_dim.unwrap_or(c.embed_dim);
        c.hidden_dim = hidden_dim.unwrap_or(c.hidden_dim);
        c.learning_rate = learning_rate.unwrap_or(c.learning_rate);
        c.batch = batch.unwrap_or(c.batch);
        if let Some(m) = mode {
            c.mode = mode_from(m)?;
        }
        c.seed = seed.unwrap_or(c.seed);
        c.validate().map_err(value_err)?;
        Ok(Self { inner: c })
    }

    #[getter]
    fn context(&self) -> usize {
        self.inner.context
    }

    #[getter]
    fn embed_dim(&self) -> usize {
        self.inner.embed_dim
    }

    #[getter]
    fn hidden_dim(&self) -> usize {
        self.inner.hidden_dim
    }

    #[getter]
    fn learning_rate(&self) -> f32 {
        self.inner.learning_rate
    }

    #[getter]
    fn batch(&self) -> usize {
        self.inner.batch
    }

    #[getter]
    fn mode(&self) -> u8 {
        self.inner.mode.code()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn estimate_memory(&self) -> PyResult<u64> {
        cognition::estimate_memory(&self.inner).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "CompressionConfig(context={}, embed_dim={}, hidden_dim={}, learning_rate={}, batch={}, mode={}, seed={})",
            c.context,
            c.embed_dim,
            c.hidden_dim,
            c.learning_rate,
            c.batch,
            c.mode.code(),
            c.seed
        )
    }
}

/// Compresses `data`; returns `(archive_bytes, report_json)`.
#[pyfunction]
#[pyo3(signature = (data, config=None))]
fn compress(py: Python<'_>, data: Vec<u8>, config: Option<PyConfig>) -> PyResult<(Vec<u8>, String)> {
    let cfg = config.map(|c| c.inner).unwrap_or_default();
    let (archive, report) = py.detach(|| pipeline::compress(&data, &cfg)).map_err(value_err)?;
    Ok((archive.to_bytes(), report.to_json()))
}

#[pyfunction]
fn decompress(py: Python<'_>, archive: Vec<u8>) -> PyResult<Vec<u8>> {
    py.detach(|| Archive::from_bytes(&archive).and_then(|a| pipeline::decompress(&a))).map_err(value_err)
}

/// True when both byte strings have the same SHA-256 digest.
#[pyfunction]
fn verify(original: &[u8], restored: &[u8]) -> bool {
    pipeline::verify(original, restored)
}

/// Normalized k-mer histogram followed by log10 of the base count.
#[pyfunction]
#[pyo3(signature = (data, window=3))]
fn data_vector(data: &[u8], window: usize) -> PyResult<Vec<f64>> {
    skmer::data_vector(&skmer::sanitize(data), window).map(|v| v.values).map_err(value_err)
}

/// Parses a natural-language request into its JSON form.
#[pyfunction]
fn parse_intent(utterance: &str) -> PyResult<String> {
    agent::parse_intent(utterance).map(|r| r.to_json()).map_err(value_err)
}

#[pyfunction]
fn compression_ratio(original_bytes: u64, compressed_bytes: u64) -> PyResult<f64> {
    metrics::compression_ratio(&MetricSample::new(original_bytes, compressed_bytes, 1.0)).map_err(value_err)
}

#[pyfunction]
fn throughput(original_bytes: u64, seconds: f64) -> PyResult<f64> {
    metrics::throughput(&MetricSample::new(original_bytes, 0, seconds)).map_err(value_err)
}

/// `(original_bytes, seconds)` pairs; total size over total time.
#[pyfunction]
fn overall_throughput(files: Vec<(u64, f64)>) -> PyResult<f64> {
    let samples: Vec<_> = files.into_iter().map(|(n, t)| MetricSample::new(n, 0, t)).collect();
    metrics::overall_throughput(&samples).map_err(value_err)
}

#[pyfunction]
fn robustness(crs: Vec<f64>) -> PyResult<f64> {
    metrics::robustness(&crs).map_err(value_err)
}

/// Number of records in the bundled parameter database.
#[pyfunction]
fn seed_database_size() -> usize {
    VectorDatabase::seed().len()
}

/// Runs a natural-language request through the full agent flow (LLM
/// disabled) and returns one report JSON per file.
#[pyfunction]
#[pyo3(signature = (utterance, db_path, seed=core_config::DEFAULT_SEED, verify=false))]
fn run_request(py: Python<'_>, utterance: &str, db_path: PathBuf, seed: u64, verify: bool) -> PyResult<Vec<String>> {
    let req = agent::parse_intent(utterance).map_err(value_err)?;
    let opts = AgentOptions { db_path, seed, verify, ..AgentOptions::default() };
    let agent = Agent::new(opts, Logger::null()).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let outcomes = py.detach(|| agent.run(&req));
    outcomes
        .into_iter()
        .map(|o| o.result.map(|r| r.to_json()).map_err(|e| PyIOError::new_err(format!("{}: {e}", o.path.display()))))
        .collect()
}

#[pymodule]
fn agentgc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(compress, m)?)?;
    m.add_function(wrap_pyfunction!(decompress, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(data_vector, m)?)?;
    m.add_function(wrap_pyfunction!(parse_intent, m)?)?;
    m.add_function(wrap_pyfunction!(compression_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(throughput, m)?)?;
    m.add_function(wrap_pyfunction!(overall_throughput, m)?)?;
    m.add_function(wrap_pyfunction!(robustness, m)?)?;
    m.add_function(wrap_pyfunction!(seed_database_size, m)?)?;
    m.add_function(wrap_pyfunction!(run_request, m)?)?;
    Ok(())
}
