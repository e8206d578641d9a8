//! Two-stage retrieval: the `3q` records nearest to `[α, β]`, re-ranked by
//! the mode objective.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::config::Mode;
use crate::skmer::DataVector;

use super::database::{ParameterRecord, VectorDatabase};
use super::CognitionError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningQuery {
    /// Memory fraction in `(0, 1]`.
    pub alpha: f64,
    pub beta: DataVector,
    pub q: usize,
    pub mode: Mode,
    /// Available memory × α.
    pub budget_bytes: u64,
}

impl TuningQuery {
    /// Total memory the fraction α was taken from.
    pub fn available_bytes(&self) -> f64 {
        self.budget_bytes as f64 / self.alpha
    }

    /// A record's peak memory expressed as a fraction of the available
    /// memory, comparable with `alpha`.
    pub fn record_alpha(&self, r: &ParameterRecord) -> f64 {
        r.peak_mem_bytes as f64 / self.available_bytes()
    }

    pub fn distance(&self, r: &ParameterRecord) -> f64 {
        let da = self.alpha - self.record_alpha(r);
        let db: f64 = self.beta.values.iter().zip(&r.beta.values).map(|(a, b)| (a - b) * (a - b)).sum();
        (da * da + db).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieved {
    /// Position in the database.
    pub index: usize,
    pub distance: f64,
    /// Mode objective; lower is better.
    pub score: f64,
    pub record: ParameterRecord,
}

fn by_distance(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Mode objective for each record of a pool, lower is better. BM uses
/// standardized CR minus standardized throughput over the pool.
pub fn objective_scores(records: &[&ParameterRecord], mode: Mode) -> Vec<f64> {
    match mode {
        Mode::Cp => records.iter().map(|r| r.cr_bits_per_base).collect(),
        Mode::Tp => records.iter().map(|r| -r.thp_kb_s).collect(),
        Mode::Bm => {
            let cr = standardize(records.iter().map(|r| r.cr_bits_per_base).collect());
            let thp = standardize(records.iter().map(|r| r.thp_kb_s).collect());
            cr.iter().zip(&thp).map(|(c, t)| c - t).collect()
        }
    }
}

/// Population z-scores; all zero when the values do not vary.
fn standardize(v: Vec<f64>) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - mean) / sd).collect()
}

pub fn retrieve_similar(db: &VectorDatabase, query: &TuningQuery) -> Result<Vec<Retrieved>, CognitionError> {
    let h = db.records.len();
    if h == 0 {
        return Err(CognitionError::ColdStart);
    }
    if let Some(r) = db.records.iter().find(|r| r.beta.values.len() != query.beta.values.len()) {
        return Err(CognitionError::Database(format!(
            "data vector length {} does not match query length {}",
            r.beta.values.len(),
            query.beta.values.len()
        )));
    }
    let q = query.q.clamp(1, h);
    let pool_size = (3 * q).min(h);

    let mut dist: Vec<(usize, f64)> = db.records.iter().map(|r| query.distance(r)).enumerate().collect();
    if pool_size < h {
        dist.select_nth_unstable_by(pool_size - 1, by_distance);
        dist.truncate(pool_size);
    }
    dist.sort_unstable_by(by_distance);

    let pool: Vec<&ParameterRecord> = dist.iter().map(|&(i, _)| &db.records[i]).collect();
    let scores = objective_scores(&pool, query.mode);
    let mut ranked: Vec<Retrieved> = dist
        .iter()
        .zip(scores)
        .map(|(&(index, distance), score)| Retrieved { index, distance, score, record: db.records[index].clone() })
        .collect();
    ranked.sort_by(|a, b| {
        a.score.total_cmp(&b.score).then(a.distance.total_cmp(&b.distance)).then(a.index.cmp(&b.index))
    });
    ranked.truncate(q);
    Ok(ranked)
}
