//! Leader flow for one request: analysis, retrieval, tuning, compression,
//! optional verification and database update, with one worker per file.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde_json::json;

use crate::cognition::{
    probe_memory, retrieve_similar, tune_parameters, CognitionError, LlmClient, ParameterRecord, TuningQuery,
    VectorDatabase,
};
use crate::config::{CompressionConfig, Mode, DEFAULT_SEED};
use crate::pipeline::{verify, Archive, Progress, RunReport, Worker};
use crate::predictor::ActiveModels;
use crate::skmer::{data_vector, sanitize, DataVector};

use super::intent::{ParsedRequest, TaskType, DEFAULT_MEMORY_PERCENT, DEFAULT_MODE};
use super::log::Logger;
use super::AgentError;

pub const ARCHIVE_EXT: &str = "aggc";
pub const DEFAULT_Q: usize = 5;

#[derive(Clone)]
pub struct AgentOptions {
    pub db_path: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub verify: bool,
    /// Output path for single-file requests.
    pub output: Option<PathBuf>,
    pub q: usize,
    pub llm: Option<Arc<dyn LlmClient>>,
}

impl Default for AgentOptions {
    fn default() -> Self {
        Self {
            db_path: PathBuf::from(crate::cognition::DB_FILE_NAME),
            seed: DEFAULT_SEED,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            verify: false,
            output: None,
            q: DEFAULT_Q,
            llm: None,
        }
    }
}

/// Outcome for one file of a request.
#[derive(Debug)]
pub struct FileOutcome {
    pub path: PathBuf,
    pub result: Result<RunReport, AgentError>,
}

pub struct Agent {
    opts: AgentOptions,
    log: Logger,
    db: Mutex<VectorDatabase>,
}

pub fn archive_path(input: &Path) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(".");
    s.push(ARCHIVE_EXT);
    PathBuf::from(s)
}

pub fn restored_path(input: &Path) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(".out");
    PathBuf::from(s)
}

fn read_file(path: &Path) -> Result<Vec<u8>, AgentError> {
    std::fs::read(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), AgentError> {
    std::fs::write(path, bytes).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))
}

impl Agent {
    pub fn new(opts: AgentOptions, log: Logger) -> Result<Self, AgentError> {
        let db = VectorDatabase::open_or_seed(&opts.db_path).map_err(AgentError::from)?;
        log.info("startup", &format!("parameter database {} holds {} records", opts.db_path.display(), db.len()));
        Ok(Self { opts, log, db: Mutex::new(db) })
    }

    pub fn options(&self) -> &AgentOptions {
        &self.opts
    }

    pub fn database_len(&self) -> usize {
        self.db.lock().expect("database lock").len()
    }

    /// Runs a parsed request over a file or every regular file in a
    /// directory.
    pub fn run(&self, req: &ParsedRequest) -> Vec<FileOutcome> {
        let path = PathBuf::from(&req.file_path);
        let files = match self.input_files(&path, req.task_type) {
            Ok(f) => f,
            Err(e) => return vec![FileOutcome { path, result: Err(e) }],
        };
        let single = !path.is_dir();
        let output = if single { self.opts.output.clone() } else { None };
        let job = |file: &Path| match req.task_type {
            TaskType::Compress => self.compress_file(
                file,
                req.memory_percent.unwrap_or(DEFAULT_MEMORY_PERCENT),
                req.mode.unwrap_or(DEFAULT_MODE),
                output.as_deref(),
            ),
            TaskType::Decompress => self.decompress_file(file, output.as_deref()),
        };
        let results: Vec<Mutex<Option<Result<RunReport, AgentError>>>> = files.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let workers = self.opts.workers.clamp(1, files.len().max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(file) = files.get(i) else { break };
                    let r = job(file);
                    if let Err(e) = &r {
                        self.log.error("worker", &format!("{}: {e}", file.display()));
                    }
                    *results[i].lock().expect("result slot") = Some(r);
                });
            }
        });
        files
            .into_iter()
            .zip(results)
            .map(|(path, r)| FileOutcome { path, result: r.into_inner().expect("result slot").expect("job ran") })
            .collect()
    }

    fn input_files(&self, path: &Path, task: TaskType) -> Result<Vec<PathBuf>, AgentError> {
        let meta = std::fs::metadata(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
        if !meta.is_dir() {
            return Ok(vec![path.to_path_buf()]);
        }
        let entries = std::fs::read_dir(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
        let mut files = Vec::new();
        for entry in entries {
            let p = entry.map_err(|e| AgentError::Io(e.to_string()))?.path();
            if !p.is_file() || p == self.opts.db_path {
                continue;
            }
            let is_archive = p.extension().is_some_and(|e| e == ARCHIVE_EXT);
            let is_restored = p.extension().is_some_and(|e| e == "out");
            let wanted = match task {
                TaskType::Compress => !is_archive && !is_restored,
                TaskType::Decompress => is_archive,
            };
            if wanted {
                files.push(p);
            }
        }
        files.sort();
        Ok(files)
    }

    /// Memory probe and data-vector extraction, run concurrently.
    fn analyze(&self, raw: &[u8], window: usize) -> Result<(u64, DataVector), AgentError> {
        let (mem, beta) = std::thread::scope(|s| {
            let mem = s.spawn(probe_memory);
            let beta = data_vector(&sanitize(raw), window);
            (mem.join().expect("memory probe thread"), beta)
        });
        let beta = beta.map_err(|e| AgentError::Internal(e.to_string()))?;
        Ok((mem.map_err(AgentError::from)?, beta))
    }

    pub fn compress_file(
        &self,
        path: &Path,
        memory_percent: f64,
        mode: Mode,
        output: Option<&Path>,
    ) -> Result<RunReport, AgentError> {
        let name = path.display().to_string();
        if !(memory_percent > 0.0 && memory_percent <= 1.0) {
            return Err(AgentError::Parse(format!("memory fraction {memory_percent} outside (0, 1]")));
        }
        let raw = read_file(path)?;
        let base = CompressionConfig { seed: self.opts.seed, mode, ..CompressionConfig::default() };

        let t = Instant::now();
        let (available, beta) = self.analyze(&raw, base.window)?;
        let budget = (available as f64 * memory_percent).floor() as u64;
        let analysis_s = t.elapsed().as_secs_f64();
        self.log.info_with(
            "analysis",
            &format!("{name}: {} bytes, {available} bytes available", raw.len()),
            json!({"file": name, "budget_bytes": budget}),
        );

        let t = Instant::now();
        let query = TuningQuery { alpha: memory_percent, beta: beta.clone(), q: self.opts.q, mode, budget_bytes: budget };
        let snapshot = self.db.lock().expect("database lock").clone();
        let records = match retrieve_similar(&snapshot, &query) {
            Ok(r) => r,
            Err(CognitionError::ColdStart) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let retrieval_s = t.elapsed().as_secs_f64();
        self.log.info_with(
            "retrieval",
            &format!("{name}: {} similar records", records.len()),
            json!({"file": name, "indices": records.iter().map(|r| r.index).collect::<Vec<_>>()}),
        );

        let t = Instant::now();
        let tuned = tune_parameters(&records, &query, self.opts.llm.as_deref(), &base);
        let tuning_s = t.elapsed().as_secs_f64();
        for note in &tuned.notes {
            self.log.warn("tuning", &format!("{name}: {note}"));
        }
        self.log.info_with(
            "tuning",
            &format!("{name}: configuration chosen"),
            json!({"file": name, "source": tuned.source, "config": tuned.config, "estimated_bytes": tuned.estimated_bytes}),
        );

        let progress = |p: Progress| {
            self.log.info_with(
                "coding",
                &format!("{name}: progress"),
                json!({"file": name, "tokens_done": p.tokens_done, "tokens_total": p.tokens_total}),
            )
        };
        let worker = Worker::new().with_progress(&progress);
        let (archive, mut report) = worker.compress(&raw, &tuned.config)?;
        let bytes = archive.to_bytes();
        let out = output.map_or_else(|| archive_path(path), Path::to_path_buf);
        write_file(&out, &bytes)?;

        for (phase, secs) in [("leader_analysis", analysis_s), ("retrieval", retrieval_s), ("tuning", tuning_s)] {
            report.wall_time_s.insert(phase.into(), secs);
        }
        report.input = Some(name.clone());
        report.output = Some(out.display().to_string());
        report.compressed_bytes = std::fs::metadata(&out).map_err(|e| AgentError::Io(e.to_string()))?.len();
        report.refresh_metrics();

        if self.opts.verify {
            let t = Instant::now();
            let parsed = Archive::from_bytes(&read_file(&out)?)?;
            let restored = Worker::new().decompress(&parsed)?;
            if !verify(&raw, &restored) {
                return Err(AgentError::Integrity(format!("{name}: verification failed")));
            }
            report.verified = true;
            self.log.info_with("verify", &format!("{name}: verified"), json!({"file": name, "seconds": t.elapsed().as_secs_f64()}));
        }

        if let Some(rec) = ParameterRecord::from_run(&tuned.config, beta, &report) {
            let mut db = self.db.lock().expect("database lock");
            db.record_result(rec)?;
        }
        self.log.info("done", &format!("{name}: {} -> {} bytes", report.original_bytes, report.compressed_bytes));
        Ok(report)
    }

    /// Restores an archive using its header only.
    pub fn decompress_file(&self, path: &Path, output: Option<&Path>) -> Result<RunReport, AgentError> {
        let name = path.display().to_string();
        let t = Instant::now();
        let bytes = read_file(path)?;
        let archive = Archive::from_bytes(&bytes)?;
        let h = &archive.header;
        let progress = |p: Progress| {
            self.log.info_with(
                "decoding",
                &format!("{name}: progress"),
                json!({"file": name, "tokens_done": p.tokens_done, "tokens_total": p.tokens_total}),
            )
        };
        let raw = Worker::new().with_progress(&progress).decompress(&archive)?;
        let out = output.map_or_else(|| restored_path(path), Path::to_path_buf);
        write_file(&out, &raw)?;
        let models = ActiveModels { public: h.uses_public(), private: h.uses_private(), dynamic: h.m >= h.config.window as u64 };
        let mut report = RunReport {
            operation: "decompress".into(),
            input: Some(name.clone()),
            output: Some(out.display().to_string()),
            original_bytes: raw.len() as u64,
            compressed_bytes: bytes.len() as u64,
            wall_time_s: [("decoding".to_string(), t.elapsed().as_secs_f64())].into_iter().collect(),
            peak_rss_bytes: crate::pipeline::peak_rss_bytes(),
            cr_bits_per_base: None,
            throughput_kb_s: None,
            verified: true,
            models: models.names().into_iter().map(String::from).collect(),
            resets: h.resets.len(),
            config: h.config.clone(),
        };
        report.refresh_metrics();
        self.log.info("done", &format!("{name}: restored {} bytes to {}", raw.len(), out.display()));
        Ok(report)
    }
}
