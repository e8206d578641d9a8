//! Small context network: token embeddings for the last `c` tokens,
//! concatenated, one tanh hidden layer and a softmax output over the
//! vocabulary, trained by plain SGD on cross-entropy.
//!
//! All arithmetic is `f32` with a fixed evaluation order and no fused
//! multiply-add, so identical seeds and update sequences give bit-identical
//! weights on the encoder and decoder side. Probabilities are normalized in
//! `f64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PredictorError;

pub const MAX_CONTEXT: usize = 1024;

/// Architecture and optimizer settings of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab: usize,
    pub context: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f32,
    pub seed: u64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), PredictorError> {
        let bad = |m: String| Err(PredictorError::InvalidConfig(m));
        if self.vocab < 2 || self.vocab > 1 << 16 {
            return bad(format!("vocabulary {} outside 2..=65536", self.vocab));
        }
        if self.context == 0 || self.context > MAX_CONTEXT {
            return bad(format!("context {} outside 1..={MAX_CONTEXT}", self.context));
        }
        if self.embed_dim == 0 || self.embed_dim > u16::MAX as usize {
            return bad(format!("embedding width {} out of range", self.embed_dim));
        }
        if self.hidden_dim == 0 || self.hidden_dim > u16::MAX as usize {
            return bad(format!("hidden width {} out of range", self.hidden_dim));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.context * self.embed_dim
    }

    /// `V·E + (c·E)·H + H + H·V + V`
    pub fn parameter_count(&self) -> usize {
        let (v, e, h) = (self.vocab, self.embed_dim, self.hidden_dim);
        v * e + self.input_dim() * h + h + h * v + v
    }

    pub(crate) fn layout(&self) -> Layout {
        let (v, e, h) = (self.vocab, self.embed_dim, self.hidden_dim);
        let emb = 0;
        let w1 = emb + v * e;
        let b1 = w1 + self.input_dim() * h;
        let w2 = b1 + h;
        let b2 = w2 + h * v;
        Layout { emb, w1, b1, w2, b2, end: b2 + v }
    }
}

/// Offsets of each tensor inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub emb: usize,
    pub w1: usize,
    pub b1: usize,
    pub w2: usize,
    pub b2: usize,
    pub end: usize,
}

/// Activations and gradient factors of the last forward/backward pass.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    context: Vec<u32>,
    x: Vec<f32>,
    h: Vec<f32>,
    logits: Vec<f32>,
    probs: Vec<f64>,
    dlogits: Vec<f32>,
    dz: Vec<f32>,
    dx: Vec<f32>,
}

impl Scratch {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    cfg: ModelConfig,
    params: Vec<f32>,
    update_count: u64,
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0f32; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0f32;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]))) + tail
}

#[inline]
fn axpy(y: &mut [f32], a: f32, x: &[f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

impl Network {
    /// Fresh network with weights drawn from ChaCha8 seeded by `cfg.seed`.
    pub fn new(cfg: ModelConfig) -> Result<Self, PredictorError> {
        cfg.validate()?;
        let lay = cfg.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut params = vec![0f32; lay.end];
        let fan = (6.0 / (cfg.input_dim() + cfg.hidden_dim) as f64).sqrt() as f32;
        for w in &mut params[lay.emb..lay.w1] {
            *w = rng.gen_range(-0.5f32..0.5);
        }
        for w in &mut params[lay.w1..lay.b1] {
            *w = rng.gen_range(-fan..fan);
        }
        for w in &mut params[lay.w2..lay.b2] {
            *w = rng.gen_range(-0.05f32..0.05);
        }
        Ok(Self { cfg, params, update_count: 0 })
    }

    pub(crate) fn from_parts(cfg: ModelConfig, params: Vec<f32>) -> Result<Self, PredictorError> {
        cfg.validate()?;
        if params.len() != cfg.parameter_count() {
            return Err(PredictorError::InvalidConfig(format!(
                "expected {} weights, got {}",
                cfg.parameter_count(),
                params.len()
            )));
        }
        Ok(Self { cfg, params, update_count: 0 })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn params(&self) -> &[f32] {
        &self.params
    }

    /// Mutable weights, for perturbation in gradient checks.
    pub fn params_mut(&mut self) -> &mut [f32] {
        &mut self.params
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn scratch(&self) -> Scratch {
        let c = &self.cfg;
        Scratch {
            context: vec![0; c.context],
            x: vec![0.0; c.input_dim()],
            h: vec![0.0; c.hidden_dim],
            logits: vec![0.0; c.vocab],
            probs: vec![0.0; c.vocab],
            dlogits: vec![0.0; c.vocab],
            dz: vec![0.0; c.hidden_dim],
            dx: vec![0.0; c.input_dim()],
        }
    }

    /// Forward pass on the last `c` tokens of `history` (left-padded with
    /// token 0). Returns `false` if the output is not finite.
    pub fn forward(&self, history: &[u32], s: &mut Scratch) -> bool {
        let c = self.cfg.context;
        let e = self.cfg.embed_dim;
        let hd = self.cfg.hidden_dim;
        let v = self.cfg.vocab;
        let lay = self.cfg.layout();
        let p = &self.params;

        let take = history.len().min(c);
        let pad = c - take;
        s.context[..pad].fill(0);
        s.context[pad..].copy_from_slice(&history[history.len() - take..]);

        for (t, &tok) in s.context.iter().enumerate() {
            let row = lay.emb + tok as usize * e;
            s.x[t * e..(t + 1) * e].copy_from_slice(&p[row..row + e]);
        }

        s.h.copy_from_slice(&p[lay.b1..lay.w2]);
        for (j, &xj) in s.x.iter().enumerate() {
            let row = lay.w1 + j * hd;
            axpy(&mut s.h, xj, &p[row..row + hd]);
        }
        for z in &mut s.h {
            *z = z.tanh();
        }

        s.logits.copy_from_slice(&p[lay.b2..lay.end]);
        for (i, &hi) in s.h.iter().enumerate() {
            let row = lay.w2 + i * v;
            axpy(&mut s.logits, hi, &p[row..row + v]);
        }

        let max = s.logits.iter().fold(f32::NEG_INFINITY, |m, &l| if l > m { l } else { m }) as f64;
        let mut sum = 0f64;
        for (pr, &l) in s.probs.iter_mut().zip(&s.logits) {
            *pr = (l as f64 - max).exp();
            sum += *pr;
        }
        for pr in &mut s.probs {
            *pr /= sum;
        }
        sum.is_finite() && s.probs.iter().all(|q| q.is_finite() && *q > 0.0)
    }

    /// Predicted distribution for the next token.
    pub fn predict(&self, history: &[u32]) -> Vec<f64> {
        let mut s = self.scratch();
        self.forward(history, &mut s);
        s.probs
    }

    /// Backward pass for the activations in `s`; returns `−ln p(target)`.
    pub fn backward(&self, s: &mut Scratch, target: u32) -> f64 {
        let hd = self.cfg.hidden_dim;
        let v = self.cfg.vocab;
        let lay = self.cfg.layout();
        let p = &self.params;
        let t = target as usize;

        let loss = -s.probs[t].ln();
        for (d, &pr) in s.dlogits.iter_mut().zip(&s.probs) {
            *d = pr as f32;
        }
        s.dlogits[t] -= 1.0;

        for i in 0..hd {
            let row = lay.w2 + i * v;
            let dh = dot(&p[row..row + v], &s.dlogits);
            let h = s.h[i];
            s.dz[i] = dh * (1.0 - h * h);
        }
        for j in 0..self.cfg.input_dim() {
            let row = lay.w1 + j * hd;
            s.dx[j] = dot(&p[row..row + hd], &s.dz);
        }
        loss
    }

    /// SGD step using the gradient factors left in `s` by [`Self::backward`].
    pub fn apply(&mut self, s: &Scratch) {
        let lr = self.cfg.learning_rate;
        let e = self.cfg.embed_dim;
        let hd = self.cfg.hidden_dim;
        let v = self.cfg.vocab;
        let lay = self.cfg.layout();
        let p = &mut self.params;

        for i in 0..hd {
            let g = -(lr * s.h[i]);
            let row = lay.w2 + i * v;
            axpy(&mut p[row..row + v], g, &s.dlogits);
        }
        axpy(&mut p[lay.b2..lay.end], -lr, &s.dlogits);
        for (j, &xj) in s.x.iter().enumerate() {
            let g = -(lr * xj);
            let row = lay.w1 + j * hd;
            axpy(&mut p[row..row + hd], g, &s.dz);
        }
        axpy(&mut p[lay.b1..lay.w2], -lr, &s.dz);
        for (t, &tok) in s.context.iter().enumerate() {
            let row = lay.emb + tok as usize * e;
            axpy(&mut p[row..row + e], -lr, &s.dx[t * e..(t + 1) * e]);
        }
        self.update_count += 1;
    }

    /// One SGD step on `(history, target)`. Returns the loss of the
    /// pre-update prediction, `−ln p(target)` in nats.
    pub fn update(&mut self, history: &[u32], target: u32) -> Result<f64, PredictorError> {
        if target as usize >= self.cfg.vocab {
            return Err(PredictorError::TargetOutOfRange { target, vocab: self.cfg.vocab });
        }
        let mut s = self.scratch();
        self.forward(history, &mut s);
        let loss = self.backward(&mut s, target);
        self.apply(&s);
        if loss.is_finite() {
            Ok(loss)
        } else {
            Err(PredictorError::Diverged)
        }
    }

    /// Dense loss gradient with respect to every parameter, laid out like
    /// [`Self::params`].
    pub fn gradient(&self, history: &[u32], target: u32) -> Vec<f32> {
        let e = self.cfg.embed_dim;
        let hd = self.cfg.hidden_dim;
        let v = self.cfg.vocab;
        let lay = self.cfg.layout();
        let mut s = self.scratch();
        self.forward(history, &mut s);
        self.backward(&mut s, target);

        let mut g = vec![0f32; lay.end];
        for i in 0..hd {
            for k in 0..v {
                g[lay.w2 + i * v + k] = s.h[i] * s.dlogits[k];
            }
        }
        g[lay.b2..lay.end].copy_from_slice(&s.dlogits);
        for (j, &xj) in s.x.iter().enumerate() {
            for i in 0..hd {
                g[lay.w1 + j * hd + i] = xj * s.dz[i];
            }
        }
        g[lay.b1..lay.w2].copy_from_slice(&s.dz);
        for (t, &tok) in s.context.iter().enumerate() {
            for u in 0..e {
                g[lay.emb + tok as usize * e + u] += s.dx[t * e + u];
            }
        }
        g
    }
}
