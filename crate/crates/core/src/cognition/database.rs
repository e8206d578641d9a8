//! Persistent store of past runs, kept as `params_results.csv`.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::CompressionConfig;
use crate::pipeline::RunReport;
use crate::skmer::{vocab_size, DataVector, MAX_WINDOW};

use super::memory::estimate_memory;
use super::CognitionError;

pub const DB_FILE_NAME: &str = "params_results.csv";

static SEED_CSV: &str = include_str!("../../assets/params_results.csv");

/// One historical run: context, peak memory, data vector, model shape,
/// measured CR and throughput, batch size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRecord {
    pub context: usize,
    pub peak_mem_bytes: u64,
    pub beta: DataVector,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f32,
    pub cr_bits_per_base: f64,
    pub thp_kb_s: f64,
    pub batch: usize,
}

impl ParameterRecord {
    pub fn validate(&self) -> Result<(), CognitionError> {
        let bad = |m: String| Err(CognitionError::Database(m));
        if !(self.cr_bits_per_base > 0.0 && self.cr_bits_per_base.is_finite()) {
            return bad(format!("cr_bits_per_base must be positive, got {}", self.cr_bits_per_base));
        }
        if !(self.thp_kb_s > 0.0 && self.thp_kb_s.is_finite()) {
            return bad(format!("thp_kb_s must be positive, got {}", self.thp_kb_s));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.context == 0 || self.embed_dim == 0 || self.hidden_dim == 0 || self.batch == 0 {
            return bad("context, embed_dim, hidden_dim and batch_zeta must be positive".into());
        }
        validate_beta(&self.beta)
    }

    /// Record for a finished compression; `None` when the run has no
    /// defined CR or throughput (empty input). Peak memory is the analytic
    /// estimate for `cfg`, so records do not depend on the host.
    pub fn from_run(cfg: &CompressionConfig, beta: DataVector, report: &RunReport) -> Option<Self> {
        let rec = Self {
            context: cfg.context,
            peak_mem_bytes: estimate_memory(cfg).ok()?,
            beta,
            embed_dim: cfg.embed_dim,
            hidden_dim: cfg.hidden_dim,
            learning_rate: cfg.learning_rate,
            cr_bits_per_base: report.cr_bits_per_base?,
            thp_kb_s: report.throughput_kb_s?,
            batch: cfg.batch,
        };
        rec.validate().is_ok().then_some(rec)
    }

    /// Applies this record's tunable fields on top of `base`.
    pub fn apply_to(&self, base: &CompressionConfig) -> CompressionConfig {
        CompressionConfig {
            context: self.context,
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            learning_rate: self.learning_rate,
            batch: self.batch,
            ..base.clone()
        }
    }
}

fn validate_beta(beta: &DataVector) -> Result<(), CognitionError> {
    let n = beta.values.len().saturating_sub(1);
    let valid_len = (1..=MAX_WINDOW).any(|k| vocab_size(k) == n);
    if !valid_len {
        return Err(CognitionError::Database(format!("data vector has {} entries", beta.values.len())));
    }
    if beta.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(CognitionError::Database("data vector entries must be finite and non-negative".into()));
    }
    let mass: f64 = beta.histogram().iter().sum();
    if mass != 0.0 && (mass - 1.0).abs() > 1e-6 {
        return Err(CognitionError::Database(format!("histogram sums to {mass}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorDatabase {
    pub records: Vec<ParameterRecord>,
    pub path: Option<PathBuf>,
}

impl VectorDatabase {
    pub fn in_memory(records: Vec<ParameterRecord>) -> Self {
        Self { records, path: None }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The records shipped with the crate (see `examples/build_seed_db.rs`).
    pub fn seed() -> Self {
        Self::from_reader(SEED_CSV.as_bytes()).expect("bundled seed database is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CognitionError> {
        let file = std::fs::File::open(path).map_err(|e| CognitionError::Io(format!("{}: {e}", path.display())))?;
        let mut db = Self::from_reader(file)?;
        db.path = Some(path.to_path_buf());
        Ok(db)
    }

    /// Loads `path`, first writing the bundled seed records there if the
    /// file does not exist.
    pub fn open_or_seed(path: &Path) -> Result<Self, CognitionError> {
        if !path.exists() {
            let mut seed = Self::seed();
            seed.path = Some(path.to_path_buf());
            seed.save()?;
            return Ok(seed);
        }
        Self::load(path)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CognitionError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(db_err)?.clone();
        let beta_len = headers.iter().filter(|h| h.starts_with("beta_")).count();
        let expected = header_row(beta_len);
        if headers.iter().ne(expected.iter().map(String::as_str)) {
            return Err(CognitionError::Database("unexpected header row".into()));
        }
        let mut records = Vec::new();
        for (line, row) in rdr.records().enumerate() {
            let row = row.map_err(db_err)?;
            let field = |i: usize| row.get(i).unwrap_or("");
            let parse_err = |i: usize| CognitionError::Database(format!("record {}: bad {}", line + 1, expected[i]));
            let int = |i: usize| field(i).parse::<u64>().map_err(|_| parse_err(i));
            let real = |i: usize| field(i).parse::<f64>().map_err(|_| parse_err(i));
            let b = 2 + beta_len;
            let rec = ParameterRecord {
                context: int(0)? as usize,
                peak_mem_bytes: int(1)?,
                beta: DataVector { values: (2..b).map(real).collect::<Result<_, _>>()? },
                embed_dim: int(b)? as usize,
                hidden_dim: int(b + 1)? as usize,
                learning_rate: field(b + 2).parse::<f32>().map_err(|_| parse_err(b + 2))?,
                cr_bits_per_base: real(b + 3)?,
                thp_kb_s: real(b + 4)?,
                batch: int(b + 5)? as usize,
            };
            rec.validate().map_err(|e| CognitionError::Database(format!("record {}: {e}", line + 1)))?;
            records.push(rec);
        }
        Ok(Self { records, path: None })
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<(), CognitionError> {
        let beta_len = self.records.first().map_or(vocab_size(3) + 1, |r| r.beta.values.len());
        if self.records.iter().any(|r| r.beta.values.len() != beta_len) {
            return Err(CognitionError::Database("records mix data vectors of different windows".into()));
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(header_row(beta_len)).map_err(db_err)?;
        for r in &self.records {
            let mut row = vec![r.context.to_string(), r.peak_mem_bytes.to_string()];
            row.extend(r.beta.values.iter().map(|v| v.to_string()));
            row.extend([
                r.embed_dim.to_string(),
                r.hidden_dim.to_string(),
                r.learning_rate.to_string(),
                r.cr_bits_per_base.to_string(),
                r.thp_kb_s.to_string(),
                r.batch.to_string(),
            ]);
            w.write_record(&row).map_err(db_err)?;
        }
        w.flush().map_err(|e| CognitionError::Io(e.to_string()))
    }

    /// Writes the whole database to its backing file via a temporary file
    /// and rename. A database without a path is left as is.
    pub fn save(&self) -> Result<(), CognitionError> {
        let Some(path) = &self.path else { return Ok(()) };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CognitionError::Io(format!("{}: {e}", dir.display())))?;
        }
        let tmp = path.with_extension("csv.tmp");
        let file = std::fs::File::create(&tmp).map_err(|e| CognitionError::Io(format!("{}: {e}", tmp.display())))?;
        self.to_writer(std::io::BufWriter::new(file))?;
        std::fs::rename(&tmp, path).map_err(|e| CognitionError::Io(format!("{}: {e}", path.display())))
    }

    /// Appends one record and persists.
    pub fn record_result(&mut self, record: ParameterRecord) -> Result<(), CognitionError> {
        record.validate()?;
        if let Some(first) = self.records.first() {
            if first.beta.values.len() != record.beta.values.len() {
                return Err(CognitionError::Database("data vector window differs from the database".into()));
            }
        }
        self.records.push(record);
        self.save()
    }
}

fn header_row(beta_len: usize) -> Vec<String> {
    let mut h = vec!["context_c".to_string(), "peak_mem_bytes".to_string()];
    h.extend((0..beta_len).map(|i| format!("beta_{i}")));
    for s in ["embed_dim", "hidden_dim", "learning_rate", "cr_bits_per_base", "thp_kb_s", "batch_zeta"] {
        h.push(s.to_string());
    }
    h
}

fn db_err(e: csv::Error) -> CognitionError {
    CognitionError::Database(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(c: usize, cr: f64, thp: f64) -> ParameterRecord {
        let mut values = vec![1.0 / 64.0; 64];
        values.push(5.5);
        ParameterRecord {
            context: c,
            peak_mem_bytes: 20_000_000,
            beta: DataVector { values },
            embed_dim: 16,
            hidden_dim: 64,
            learning_rate: 0.02,
            cr_bits_per_base: cr,
            thp_kb_s: thp,
            batch: 320,
        }
    }

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(DB_FILE_NAME);
        let mut db = VectorDatabase { records: Vec::new(), path: Some(path.clone()) };
        db.save().unwrap();
        assert_eq!(VectorDatabase::load(&path).unwrap().len(), 0);
        db.record_result(record(32, 1.9, 40.0)).unwrap();
        assert_eq!(db.len(), 1);
        let mut r = record(16, 1.912_345_678_9, 12.25);
        r.learning_rate = 0.013_7;
        db.record_result(r).unwrap();
        assert_eq!(VectorDatabase::load(&path).unwrap(), db);
    }

    #[test]
    fn header_names() {
        let mut buf = Vec::new();
        VectorDatabase::in_memory(vec![record(8, 1.0, 1.0)]).to_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("context_c,peak_mem_bytes,beta_0,beta_1,"));
        assert!(header.ends_with("beta_64,embed_dim,hidden_dim,learning_rate,cr_bits_per_base,thp_kb_s,batch_zeta"));
    }

    #[test]
    fn rejects_invalid_rows() {
        let mut r = record(8, 1.0, 1.0);
        r.cr_bits_per_base = 0.0;
        assert!(VectorDatabase::in_memory(vec![]).record_result(r).is_err());
        assert!(VectorDatabase::from_reader("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn seed_database_size() {
        assert_eq!(VectorDatabase::seed().len(), 112);
    }
}
