//! Parameter tuning: clamped LLM advice, or a deterministic fallback.

use serde::{Deserialize, Serialize};

use crate::config::CompressionConfig;

use super::llm::{parse_suggestion, LlmClient};
use super::memory::estimate_memory;
use super::prompt::build_prompt;
use super::retrieval::{Retrieved, TuningQuery};

/// Smallest batch the halving ladder descends to.
pub const MIN_LADDER_BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuneSource {
    Llm,
    Fallback,
    ColdStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub config: CompressionConfig,
    pub source: TuneSource,
    pub estimated_bytes: u64,
    /// False only when even the smallest allowed configuration exceeds the
    /// budget.
    pub within_budget: bool,
    pub notes: Vec<String>,
}

/// Per-field `[min, max]` over a set of records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ranges {
    pub context: (usize, usize),
    pub embed_dim: (usize, usize),
    pub hidden_dim: (usize, usize),
    pub learning_rate: (f32, f32),
    pub batch: (usize, usize),
}

fn span<T: PartialOrd + Copy>(mut it: impl Iterator<Item = T>) -> (T, T) {
    let first = it.next().expect("non-empty");
    it.fold((first, first), |(lo, hi), x| (if x < lo { x } else { lo }, if x > hi { x } else { hi }))
}

impl Ranges {
    pub fn of(records: &[Retrieved]) -> Option<Self> {
        if records.is_empty() {
            return None;
        }
        let r = || records.iter().map(|x| &x.record);
        Some(Self {
            context: span(r().map(|x| x.context)),
            embed_dim: span(r().map(|x| x.embed_dim)),
            hidden_dim: span(r().map(|x| x.hidden_dim)),
            learning_rate: span(r().map(|x| x.learning_rate)),
            batch: span(r().map(|x| x.batch)),
        })
    }

    pub fn contains(&self, c: &CompressionConfig) -> bool {
        let within = |v, (lo, hi)| lo <= v && v <= hi;
        within(c.context, self.context)
            && within(c.embed_dim, self.embed_dim)
            && within(c.hidden_dim, self.hidden_dim)
            && self.learning_rate.0 <= c.learning_rate
            && c.learning_rate <= self.learning_rate.1
            && within(c.batch, self.batch)
    }

    fn minimum(&self) -> (usize, usize, usize, usize) {
        (self.context.0, self.embed_dim.0, self.hidden_dim.0, self.batch.0)
    }
}

fn clamp_int(v: f64, (lo, hi): (usize, usize)) -> usize {
    (v.round().max(0.0) as usize).clamp(lo, hi)
}

fn fits(cfg: &CompressionConfig, budget: u64) -> bool {
    estimate_memory(cfg).is_ok_and(|e| e <= budget)
}

/// Shrinks `cfg` until it fits `budget`: halve the batch down to
/// `max(32, min)` then the minimum, then likewise hidden, embed and context.
/// Returns whether the budget was met.
pub fn fit_budget(cfg: &mut CompressionConfig, floors: (usize, usize, usize, usize), budget: u64) -> bool {
    let (c_min, e_min, h_min, z_min) = floors;
    if fits(cfg, budget) {
        return true;
    }
    let ladder_floor = MIN_LADDER_BATCH.max(z_min);
    while cfg.batch / 2 >= ladder_floor {
        cfg.batch /= 2;
        if fits(cfg, budget) {
            return true;
        }
    }
    if cfg.batch > z_min {
        cfg.batch = z_min;
        if fits(cfg, budget) {
            return true;
        }
    }
    type Field = fn(&mut CompressionConfig) -> &mut usize;
    let fields: [(Field, usize); 3] =
        [(|c| &mut c.hidden_dim, h_min), (|c| &mut c.embed_dim, e_min), (|c| &mut c.context, c_min)];
    for (field, floor) in fields {
        while *field(cfg) > floor {
            let v = field(cfg);
            *v = (*v / 2).max(floor);
            if fits(cfg, budget) {
                return true;
            }
        }
    }
    false
}

fn best(records: &[Retrieved]) -> &Retrieved {
    records
        .iter()
        .min_by(|a, b| a.score.total_cmp(&b.score).then(a.distance.total_cmp(&b.distance)).then(a.index.cmp(&b.index)))
        .expect("non-empty")
}

/// Chooses the configuration for one run. `base` supplies the fields that
/// are not tuned (window, seed); the mode always comes from the query.
pub fn tune_parameters(
    records: &[Retrieved],
    query: &TuningQuery,
    llm: Option<&dyn LlmClient>,
    base: &CompressionConfig,
) -> TuneOutcome {
    let base = CompressionConfig { mode: query.mode, ..base.clone() };
    let mut notes = Vec::new();

    let Some(ranges) = Ranges::of(records) else {
        let mut cfg = CompressionConfig { stride: base.stride, window: base.window, mode: base.mode, seed: base.seed, ..Default::default() };
        let within_budget = fit_budget(&mut cfg, (1, 1, 1, 1), query.budget_bytes);
        notes.push("empty database: using cold-start defaults".into());
        return finish(cfg, TuneSource::ColdStart, within_budget, notes);
    };

    let mut cfg = best(records).record.apply_to(&base);
    let mut source = TuneSource::Fallback;
    if let Some(client) = llm {
        let advice = client.complete(&build_prompt(records, query)).and_then(|r| parse_suggestion(&r));
        match advice {
            Ok(s) => {
                if let Some(v) = s.context {
                    cfg.context = clamp_int(v, ranges.context);
                }
                if let Some(v) = s.embed_dim {
                    cfg.embed_dim = clamp_int(v, ranges.embed_dim);
                }
                if let Some(v) = s.hidden_dim {
                    cfg.hidden_dim = clamp_int(v, ranges.hidden_dim);
                }
                if let Some(v) = s.learning_rate {
                    let (lo, hi) = ranges.learning_rate;
                    cfg.learning_rate = (v as f32).clamp(lo, hi);
                }
                if let Some(v) = s.batch {
                    cfg.batch = clamp_int(v, ranges.batch);
                }
                if s.mode.is_some_and(|m| m != query.mode.code() as f64) {
                    notes.push("model suggested a different mode; keeping the requested one".into());
                }
                source = TuneSource::Llm;
            }
            Err(e) => notes.push(format!("LLM advice discarded: {e}")),
        }
    }
    let within_budget = fit_budget(&mut cfg, ranges.minimum(), query.budget_bytes);
    if !within_budget {
        notes.push("no configuration within the retrieved ranges fits the memory budget".into());
    }
    finish(cfg, source, within_budget, notes)
}

fn finish(config: CompressionConfig, source: TuneSource, within_budget: bool, notes: Vec<String>) -> TuneOutcome {
    let estimated_bytes = estimate_memory(&config).unwrap_or(u64::MAX);
    TuneOutcome { config, source, estimated_bytes, within_budget, notes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cognition::database::ParameterRecord;
    use crate::cognition::CognitionError;
    use crate::config::Mode;
    use crate::skmer::DataVector;

    fn beta() -> DataVector {
        let mut values = vec![1.0 / 64.0; 64];
        values.push(6.0);
        DataVector { values }
    }

    fn retrieved(i: usize, c: usize, thp: f64, batch: usize) -> Retrieved {
        Retrieved {
            index: i,
            distance: 0.1,
            score: -thp,
            record: ParameterRecord {
                context: c,
                peak_mem_bytes: 1 << 25,
                beta: beta(),
                embed_dim: 16,
                hidden_dim: 64,
                learning_rate: 0.02,
                cr_bits_per_base: 1.9,
                thp_kb_s: thp,
                batch,
            },
        }
    }

    fn query(mode: Mode, budget: u64) -> TuningQuery {
        TuningQuery { alpha: 0.7, beta: beta(), q: 5, mode, budget_bytes: budget }
    }

    struct Canned(&'static str);

    impl LlmClient for Canned {
        fn complete(&self, _prompt: &str) -> Result<String, CognitionError> {
            Ok(self.0.to_string())
        }
    }

    struct Offline;

    impl LlmClient for Offline {
        fn complete(&self, _prompt: &str) -> Result<String, CognitionError> {
            Err(CognitionError::Llm("connection refused".into()))
        }
    }

    #[test]
    fn llm_context_is_clamped() {
        let recs = vec![retrieved(0, 16, 10.0, 320), retrieved(1, 32, 20.0, 320), retrieved(2, 64, 30.0, 320)];
        let llm = Canned(r#"{"context-length": "128", "BatchSize": "1", "mode": "1"}"#);
        let out = tune_parameters(&recs, &query(Mode::Tp, 1 << 32), Some(&llm), &CompressionConfig::default());
        assert_eq!(out.source, TuneSource::Llm);
        assert_eq!(out.config.context, 64);
        assert_eq!(out.config.batch, 320);
    }

    #[test]
    fn offline_tp_picks_fastest() {
        let recs = vec![retrieved(0, 32, 100.0, 320), retrieved(1, 16, 50.0, 320)];
        let out = tune_parameters(&recs, &query(Mode::Tp, 1 << 32), Some(&Offline), &CompressionConfig::default());
        assert_eq!(out.source, TuneSource::Fallback);
        assert_eq!(out.config.context, 32);
        assert_eq!(out.config.mode, Mode::Tp);
        assert!(out.notes[0].contains("discarded"));
    }

    #[test]
    fn batch_ladder_under_budget() {
        let mut recs = vec![retrieved(0, 256, 100.0, 2048), retrieved(1, 256, 10.0, 32)];
        for r in &mut recs {
            r.record.embed_dim = 32;
        }
        let budget = 64 << 20;
        let out = tune_parameters(&recs, &query(Mode::Tp, budget), None, &CompressionConfig::default());
        let base = recs[0].record.apply_to(&CompressionConfig::default());
        assert!(estimate_memory(&base).unwrap() > budget);
        let expected = [2048, 1024, 512, 256, 128, 64, 32]
            .into_iter()
            .find(|&z| estimate_memory(&CompressionConfig { batch: z, ..base.clone() }).unwrap() <= budget)
            .unwrap();
        assert_eq!(out.config.batch, expected);
        assert!(out.within_budget);
    }

    #[test]
    fn cold_start_defaults() {
        let out = tune_parameters(&[], &query(Mode::Cp, 1 << 32), None, &CompressionConfig::default());
        assert_eq!(out.source, TuneSource::ColdStart);
        let d = CompressionConfig::default();
        assert_eq!(
            (out.config.context, out.config.embed_dim, out.config.hidden_dim, out.config.learning_rate, out.config.batch),
            (d.context, d.embed_dim, d.hidden_dim, d.learning_rate, d.batch)
        );
        assert_eq!(out.config.mode, Mode::Cp);
    }
}
