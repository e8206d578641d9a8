//! The worker: end-to-end compression and decompression of one input.
//!
//! Token `i < c` is coded with the uniform distribution. From `i = c` on,
//! each token is coded with the mixed prediction of the active models and
//! only then used to update the dynamic model and the mixer, so the decoder
//! can replay the exact same state sequence.

pub mod archive;
pub mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coder::{quantize, CoderError, ProbabilityVector, RangeDecoder, RangeEncoder};
use crate::config::CompressionConfig;
use crate::predictor::{
    bundled_public_model, private_model_config, select_for_len, train_static, weights, ActiveModels, Mixer,
    Network, PredictorError, Scratch, StaticModel,
};
use crate::skmer::{self, Exception, GenomeSequence, SkmerParams, TokenSequence};

pub use archive::{Archive, Header, Reset, FLAG_PRIVATE, FLAG_PUBLIC};
pub use report::{peak_rss_bytes, RunReport};

/// Learning-rate resets tolerated before a stream is declared divergent.
pub const MAX_RESETS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("not an archive (bad magic)")]
    BadMagic,
    #[error("unsupported archive version {0}")]
    UnsupportedVersion(u8),
    #[error("archive is truncated")]
    Truncated,
    #[error("corrupt archive: {0}")]
    Corrupt(String),
    #[error("integrity check failed: restored data does not match the stored SHA-256")]
    IntegrityMismatch,
    #[error("archive needs the bundled public model, which is unavailable or incompatible")]
    MissingPublicModel,
    #[error("dynamic model diverged more than {MAX_RESETS} times")]
    Diverged,
    #[error("coder: {0}")]
    Coder(#[from] CoderError),
}

impl From<PredictorError> for PipelineError {
    fn from(e: PredictorError) -> Self {
        match e {
            PredictorError::Diverged => PipelineError::Diverged,
            other => PipelineError::Config(other.to_string()),
        }
    }
}

/// Coding progress, reported roughly every 1% of tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub tokens_done: u64,
    pub tokens_total: u64,
}

pub type ProgressFn<'a> = &'a (dyn Fn(Progress) + Sync);

/// Compression/decompression executor for one stream.
#[derive(Clone, Copy)]
pub struct Worker<'a> {
    public: Option<&'a StaticModel>,
    progress: Option<ProgressFn<'a>>,
}

impl Default for Worker<'static> {
    fn default() -> Self {
        Self { public: bundled_public_model(), progress: None }
    }
}

impl<'a> Worker<'a> {
    pub fn new() -> Worker<'static> {
        Worker::default()
    }

    pub fn with_public_model(self, model: Option<&'a StaticModel>) -> Self {
        Self { public: model, ..self }
    }

    pub fn with_progress(self, f: ProgressFn<'a>) -> Self {
        Self { progress: Some(f), ..self }
    }

    fn public_for(&self, vocab: usize) -> Option<&'a StaticModel> {
        self.public.filter(|m| m.config().vocab == vocab)
    }

    pub fn compress(&self, raw: &[u8], cfg: &CompressionConfig) -> Result<(Archive, RunReport), PipelineError> {
        cfg.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        let mut times = BTreeMap::new();
        let t0 = Instant::now();
        let k = cfg.window;
        let m = raw.len();
        let sha256: [u8; 32] = Sha256::digest(raw).into();
        let params = SkmerParams::coding(k).map_err(|e| PipelineError::Config(e.to_string()))?;

        let mut header = Header {
            flags: 0,
            config: cfg.clone(),
            m: m as u64,
            tail_len: (m % k) as u8,
            resets: Vec::new(),
            exceptions: Vec::new(),
            sha256,
        };

        if m < k {
            // too short for one token: keep every byte verbatim
            header.exceptions = raw.iter().enumerate().map(|(i, &b)| Exception { position: i as u64, byte: b }).collect();
            times.insert("analysis".into(), t0.elapsed().as_secs_f64());
            let archive = Archive { header, sprm_blob: Vec::new(), payload: Vec::new() };
            let report = self.report(&archive, times, ActiveModels::default());
            return Ok((archive, report));
        }

        let seq = skmer::sanitize(raw);
        let tokens = skmer::encode_skmer(&seq.bases, params).map_err(|e| PipelineError::Config(e.to_string()))?;
        header.exceptions = seq.exceptions;
        let public = self.public_for(cfg.vocab());
        let active = select_for_len(cfg.mode, m, public.is_some());
        times.insert("analysis".into(), t0.elapsed().as_secs_f64());

        let t1 = Instant::now();
        let private = if active.private {
            match train_static(&tokens.tokens, private_model_config(cfg), 1) {
                Ok(model) => Some(model),
                Err(PredictorError::Diverged) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        if active.private {
            times.insert("sprm_training".into(), t1.elapsed().as_secs_f64());
        }
        let active = ActiveModels { private: private.is_some(), ..active };
        let public = public.filter(|_| active.public);
        if active.public {
            header.flags |= FLAG_PUBLIC;
        }
        let sprm_blob = match &private {
            Some(model) => {
                header.flags |= FLAG_PRIVATE;
                weights::encode(model)
            }
            None => Vec::new(),
        };

        let t2 = Instant::now();
        let statics: Vec<&StaticModel> = public.into_iter().chain(private.as_ref()).collect();
        let mut engine = Engine::new(cfg, statics)?;
        let payload = engine.encode(&tokens.tokens, self.progress)?;
        header.resets = engine.resets;
        times.insert("coding".into(), t2.elapsed().as_secs_f64());

        let archive = Archive { header, sprm_blob, payload };
        let report = self.report(&archive, times, active);
        Ok((archive, report))
    }

    pub fn decompress(&self, archive: &Archive) -> Result<Vec<u8>, PipelineError> {
        let h = &archive.header;
        let cfg = &h.config;
        cfg.validate().map_err(|e| PipelineError::Corrupt(e.to_string()))?;
        let k = cfg.window;
        let m = usize::try_from(h.m).map_err(|_| PipelineError::Corrupt("length overflows".into()))?;
        if h.tail_len as usize != m % k {
            return Err(PipelineError::Corrupt(format!("tail length {} for m={m}, k={k}", h.tail_len)));
        }

        let bases = if m < k {
            if !archive.payload.is_empty() || archive.header.flags != 0 {
                return Err(PipelineError::Corrupt("short input with a coded payload".into()));
            }
            vec![0u8; m]
        } else {
            let public = if h.uses_public() {
                Some(self.public_for(cfg.vocab()).ok_or(PipelineError::MissingPublicModel)?)
            } else {
                None
            };
            let private = if h.uses_private() {
                let model = weights::decode(&archive.sprm_blob).map_err(|e| PipelineError::Corrupt(e.to_string()))?;
                if model.config().vocab != cfg.vocab() {
                    return Err(PipelineError::Corrupt("private model vocabulary mismatch".into()));
                }
                Some(model)
            } else {
                None
            };
            let statics: Vec<&StaticModel> = public.into_iter().chain(private.as_ref()).collect();
            let mut engine = Engine::new(cfg, statics)?;
            let n = skmer::token_count(m, k);
            let tokens = engine.decode(&archive.payload, n, self.progress)?;
            if engine.resets != h.resets {
                return Err(PipelineError::IntegrityMismatch);
            }
            let ts = TokenSequence { tokens, tail_len: m % k, source_len: m };
            let params = SkmerParams::coding(k).map_err(|e| PipelineError::Corrupt(e.to_string()))?;
            skmer::decode_skmer(&ts, params).map_err(|e| PipelineError::Corrupt(e.to_string()))?
        };

        let seq = GenomeSequence { bases, exceptions: h.exceptions.clone() };
        let raw = skmer::desanitize(&seq).map_err(|_| PipelineError::IntegrityMismatch)?;
        let digest: [u8; 32] = Sha256::digest(&raw).into();
        if digest != h.sha256 {
            return Err(PipelineError::IntegrityMismatch);
        }
        Ok(raw)
    }

    fn report(&self, archive: &Archive, times: BTreeMap<String, f64>, active: ActiveModels) -> RunReport {
        let mut r = RunReport {
            operation: "compress".into(),
            input: None,
            output: None,
            original_bytes: archive.header.m,
            compressed_bytes: archive.serialized_len() as u64,
            wall_time_s: times,
            peak_rss_bytes: peak_rss_bytes(),
            cr_bits_per_base: None,
            throughput_kb_s: None,
            verified: false,
            models: active.names().into_iter().map(String::from).collect(),
            resets: archive.header.resets.len(),
            config: archive.header.config.clone(),
        };
        r.refresh_metrics();
        r
    }
}

pub fn compress(raw: &[u8], cfg: &CompressionConfig) -> Result<(Archive, RunReport), PipelineError> {
    Worker::new().compress(raw, cfg)
}

pub fn decompress(archive: &Archive) -> Result<Vec<u8>, PipelineError> {
    Worker::new().decompress(archive)
}

/// True iff both inputs have the same SHA-256 digest.
pub fn verify(original: &[u8], restored: &[u8]) -> bool {
    Sha256::digest(original) == Sha256::digest(restored)
}

/// Model state shared by the encoder and decoder.
struct Engine<'m> {
    cfg: CompressionConfig,
    vocab: usize,
    dm: Network,
    dm_s: Scratch,
    learning_rate: f32,
    statics: Vec<&'m StaticModel>,
    static_s: Vec<Scratch>,
    static_out: Vec<Vec<f64>>,
    mixer: Mixer,
    mixed: Vec<f64>,
    uniform: ProbabilityVector,
    resets: Vec<Reset>,
}

impl<'m> Engine<'m> {
    fn new(cfg: &CompressionConfig, statics: Vec<&'m StaticModel>) -> Result<Self, PipelineError> {
        let vocab = cfg.vocab();
        let dm = Network::new(cfg.model_config())?;
        Ok(Self {
            cfg: cfg.clone(),
            vocab,
            dm_s: dm.scratch(),
            dm,
            learning_rate: cfg.learning_rate,
            static_s: statics.iter().map(|m| m.network().scratch()).collect(),
            static_out: vec![vec![0.0; vocab]; statics.len()],
            mixer: Mixer::new(statics.len() + 1),
            statics,
            mixed: Vec::with_capacity(vocab),
            uniform: ProbabilityVector::uniform(vocab)?,
            resets: Vec::new(),
        })
    }

    fn reset(&mut self, position: usize) -> Result<(), PipelineError> {
        if self.resets.len() >= MAX_RESETS {
            return Err(PipelineError::Diverged);
        }
        self.learning_rate /= 2.0;
        let mut mc = self.cfg.model_config();
        mc.learning_rate = self.learning_rate;
        self.dm = Network::new(mc)?;
        self.dm_s = self.dm.scratch();
        self.resets.push(Reset { position: position as u64, learning_rate: self.learning_rate });
        Ok(())
    }

    fn compute_statics(&mut self, history: &[u32]) {
        for ((model, s), out) in self.statics.iter().zip(&mut self.static_s).zip(&mut self.static_out) {
            static_predict(model.network(), history, s, out);
        }
    }

    /// Mixed, quantized distribution for position `i`; `static_out` must
    /// already hold the static predictions.
    fn predict(&mut self, i: usize, history: &[u32]) -> Result<ProbabilityVector, PipelineError> {
        if !self.dm.forward(history, &mut self.dm_s) {
            self.reset(i)?;
            if !self.dm.forward(history, &mut self.dm_s) {
                return Err(PipelineError::Diverged);
            }
        }
        let mut outs: Vec<&[f64]> = self.static_out.iter().map(Vec::as_slice).collect();
        outs.push(self.dm_s.probs());
        self.mixer.mix(&outs, &mut self.mixed);
        Ok(quantize(&self.mixed)?)
    }

    fn learn(&mut self, i: usize, target: u32) -> Result<(), PipelineError> {
        let mut outs: Vec<&[f64]> = self.static_out.iter().map(Vec::as_slice).collect();
        outs.push(self.dm_s.probs());
        self.mixer.observe(&outs, target as usize);
        let loss = self.dm.backward(&mut self.dm_s, target);
        if loss.is_finite() {
            self.dm.apply(&self.dm_s);
            Ok(())
        } else {
            self.reset(i)
        }
    }

    fn encode(&mut self, tokens: &[u32], progress: Option<ProgressFn>) -> Result<Vec<u8>, PipelineError> {
        let n = tokens.len();
        let c = self.cfg.context.min(n);
        let mut enc = RangeEncoder::new();
        let mut tick = Ticker::new(n, progress);
        for &t in &tokens[..c] {
            enc.encode(&self.uniform, t as usize)?;
            tick.step();
        }
        let batch = self.cfg.batch.max(1);
        let mut buffers: Vec<Vec<f64>> = vec![Vec::new(); self.statics.len()];
        let mut start = c;
        while start < n {
            let end = (start + batch).min(n);
            for (model, buf) in self.statics.iter().zip(&mut buffers) {
                static_batch(model.network(), tokens, start, end, self.vocab, buf);
            }
            for i in start..end {
                let j = (i - start) * self.vocab;
                for (out, buf) in self.static_out.iter_mut().zip(&buffers) {
                    out.copy_from_slice(&buf[j..j + self.vocab]);
                }
                let pv = self.predict(i, &tokens[..i])?;
                enc.encode(&pv, tokens[i] as usize)?;
                self.learn(i, tokens[i])?;
                tick.step();
            }
            start = end;
        }
        Ok(enc.finish())
    }

    fn decode(&mut self, payload: &[u8], n: usize, progress: Option<ProgressFn>) -> Result<Vec<u32>, PipelineError> {
        let c = self.cfg.context.min(n);
        let mut dec = RangeDecoder::new(payload);
        let mut tokens = Vec::with_capacity(n);
        let mut tick = Ticker::new(n, progress);
        for _ in 0..c {
            tokens.push(dec.decode(&self.uniform) as u32);
            tick.step();
        }
        for i in c..n {
            self.compute_statics(&tokens);
            let pv = self.predict(i, &tokens)?;
            let t = dec.decode(&pv) as u32;
            self.learn(i, t)?;
            tokens.push(t);
            tick.step();
        }
        Ok(tokens)
    }
}

fn static_predict(net: &Network, history: &[u32], s: &mut Scratch, out: &mut [f64]) {
    if net.forward(history, s) {
        out.copy_from_slice(s.probs());
    } else {
        out.fill(1.0 / out.len() as f64);
    }
}

/// Static predictions for positions `start..end`, computed in parallel.
fn static_batch(net: &Network, tokens: &[u32], start: usize, end: usize, vocab: usize, buf: &mut Vec<f64>) {
    buf.resize((end - start) * vocab, 0.0);
    buf.par_chunks_mut(vocab)
        .enumerate()
        .for_each_init(|| net.scratch(), |s, (j, out)| static_predict(net, &tokens[..start + j], s, out));
}

struct Ticker<'a> {
    total: u64,
    done: u64,
    next: u64,
    step: u64,
    f: Option<ProgressFn<'a>>,
}

impl<'a> Ticker<'a> {
    fn new(total: usize, f: Option<ProgressFn<'a>>) -> Self {
        let step = (total as u64).div_ceil(100).max(1);
        Self { total: total as u64, done: 0, next: step, step, f }
    }

    #[inline]
    fn step(&mut self) {
        self.done += 1;
        if self.done >= self.next || self.done == self.total {
            self.next += self.step;
            if let Some(f) = self.f {
                f(Progress { tokens_done: self.done, tokens_total: self.total });
            }
        }
    }
}
