//! Convex mixing of per-model distributions with loss-driven weights.
//!
//! Each model keeps an exponential moving average of its code length on the
//! revealed tokens; weights are `softmax(−η · ema)` projected onto the simplex
//! with a floor of [`WEIGHT_FLOOR`].

pub const WEIGHT_FLOOR: f64 = 1e-3;
pub const DEFAULT_DECAY: f64 = 0.99;
pub const DEFAULT_SHARPNESS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Mixer {
    weights: Vec<f64>,
    ema_bits: Vec<f64>,
    decay: f64,
    sharpness: f64,
}

impl Mixer {
    pub fn new(models: usize) -> Self {
        Self::with_params(models, DEFAULT_DECAY, DEFAULT_SHARPNESS)
    }

    pub fn with_params(models: usize, decay: f64, sharpness: f64) -> Self {
        assert!(models > 0, "mixer needs at least one model");
        assert!(decay > 0.0 && decay < 1.0);
        assert!(sharpness > 0.0);
        Self { weights: vec![1.0 / models as f64; models], ema_bits: vec![0.0; models], decay, sharpness }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ema_bits(&self) -> &[f64] {
        &self.ema_bits
    }

    /// `Σ wᵢ · pᵢ` written into `out`.
    pub fn mix(&self, outputs: &[&[f64]], out: &mut Vec<f64>) {
        assert_eq!(outputs.len(), self.weights.len());
        let n = outputs[0].len();
        out.clear();
        out.resize(n, 0.0);
        for (p, &w) in outputs.iter().zip(&self.weights) {
            for (o, &q) in out.iter_mut().zip(p.iter()) {
                *o += w * q;
            }
        }
    }

    /// Feeds back the revealed token and refreshes the weights.
    pub fn observe(&mut self, outputs: &[&[f64]], target: usize) {
        for (ema, p) in self.ema_bits.iter_mut().zip(outputs) {
            let bits = -p[target].log2();
            *ema = self.decay * *ema + (1.0 - self.decay) * bits;
        }
        if self.weights.len() == 1 {
            return;
        }
        let best = self.ema_bits.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for (w, &ema) in self.weights.iter_mut().zip(&self.ema_bits) {
            *w = (-self.sharpness * (ema - best)).exp();
            total += *w;
        }
        for w in &mut self.weights {
            *w /= total;
        }
        project_floor(&mut self.weights, WEIGHT_FLOOR);
    }
}

/// Raises every weight to at least `floor`, taking the mass proportionally
/// from the unfloored weights, so the result stays on the simplex.
fn project_floor(w: &mut [f64], floor: f64) {
    let n = w.len();
    let mut pinned = vec![false; n];
    loop {
        let free_mass: f64 = w.iter().zip(&pinned).filter(|(_, &p)| !p).map(|(x, _)| *x).sum();
        let budget = 1.0 - floor * pinned.iter().filter(|&&p| p).count() as f64;
        let scale = budget / free_mass;
        let mut changed = false;
        for i in 0..n {
            if !pinned[i] && w[i] * scale < floor {
                pinned[i] = true;
                changed = true;
            }
        }
        if !changed {
            for i in 0..n {
                w[i] = if pinned[i] { floor } else { w[i] * scale };
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_give_elementwise_mean() {
        let m = Mixer::new(2);
        let p1 = [0.97, 0.01, 0.01, 0.01];
        let p2 = [0.25; 4];
        let mut out = Vec::new();
        m.mix(&[&p1, &p2], &mut out);
        for i in 0..4 {
            assert!((out[i] - (p1[i] + p2[i]) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_model_is_identity() {
        let mut m = Mixer::new(1);
        let p = [0.1, 0.2, 0.3, 0.4];
        let mut out = Vec::new();
        m.observe(&[&p], 2);
        m.mix(&[&p], &mut out);
        assert_eq!(out, p.to_vec());
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn floor_projection_stays_on_simplex() {
        let mut w = vec![0.999_999, 0.000_000_5, 0.000_000_5];
        project_floor(&mut w, WEIGHT_FLOOR);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x >= WEIGHT_FLOOR - 1e-15));
        assert_eq!(w[1], WEIGHT_FLOOR);
    }
}
