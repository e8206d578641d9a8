//! Probability engine: a static public model (SPuM), an optional static
//! private model trained on the input (SPrM), an online dynamic model (DM),
//! the rule that selects among them, and the mixer that combines them.

mod mixer;
mod network;
pub mod weights;

use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

pub use mixer::{Mixer, DEFAULT_DECAY, DEFAULT_SHARPNESS, WEIGHT_FLOOR};
pub use network::{Layout, ModelConfig, Network, Scratch, MAX_CONTEXT};

use crate::config::{CompressionConfig, Mode};
use crate::skmer::DataVector;

#[derive(Debug, Error, PartialEq)]
pub enum PredictorError {
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("target token {target} outside vocabulary {vocab}")]
    TargetOutOfRange { target: u32, vocab: usize },
    #[error("non-finite loss; the model diverged")]
    Diverged,
    #[error("invalid weights blob: {0}")]
    BadWeights(String),
}

/// A trained network whose weights can no longer change.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticModel(Network);

impl StaticModel {
    pub fn freeze(net: Network) -> Self {
        Self(net)
    }

    pub fn network(&self) -> &Network {
        &self.0
    }

    pub fn config(&self) -> &ModelConfig {
        self.0.config()
    }

    pub fn predict(&self, history: &[u32]) -> Vec<f64> {
        self.0.predict(history)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        weights::decode(&bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, weights::encode(self))
    }
}

/// Runs `passes` sweeps of online SGD over `tokens` with a sliding context
/// and freezes the result.
pub fn train_static(tokens: &[u32], cfg: ModelConfig, passes: usize) -> Result<StaticModel, PredictorError> {
    let mut net = Network::new(cfg)?;
    let mut s = net.scratch();
    for _ in 0..passes {
        for (i, &t) in tokens.iter().enumerate() {
            if t as usize >= net.config().vocab {
                return Err(PredictorError::TargetOutOfRange { target: t, vocab: net.config().vocab });
            }
            net.forward(&tokens[..i], &mut s);
            let loss = net.backward(&mut s, t);
            if !loss.is_finite() {
                return Err(PredictorError::Diverged);
            }
            net.apply(&s);
        }
    }
    Ok(StaticModel::freeze(net))
}

/// Base count from which CP mode adds a private model.
pub const PRIVATE_MODEL_MIN_BASES: usize = 65_536;

/// Which models take part in coding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ActiveModels {
    pub public: bool,
    pub private: bool,
    pub dynamic: bool,
}

impl ActiveModels {
    pub fn count(&self) -> usize {
        self.public as usize + self.private as usize + self.dynamic as usize
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.public {
            v.push("SPuM");
        }
        if self.private {
            v.push("SPrM");
        }
        if self.dynamic {
            v.push("DM");
        }
        v
    }
}

/// Model selector: TP or inputs under 65,536 bases use the dynamic model
/// alone; BM adds the public model; CP on large inputs adds both static
/// models. The public model is dropped when no weights are available.
pub fn select_for_len(mode: Mode, bases: usize, public_available: bool) -> ActiveModels {
    let dm_only = ActiveModels { public: false, private: false, dynamic: true };
    if mode == Mode::Tp || bases < PRIVATE_MODEL_MIN_BASES {
        return dm_only;
    }
    match mode {
        Mode::Bm => ActiveModels { public: public_available, ..dm_only },
        Mode::Cp => ActiveModels { public: public_available, private: true, dynamic: true },
        Mode::Tp => dm_only,
    }
}

pub fn select_models(cfg: &CompressionConfig, beta: &DataVector, public_available: bool) -> ActiveModels {
    select_for_len(cfg.mode, beta.approx_len().round() as usize, public_available)
}

/// Architecture of the private model stored inside CP archives. Kept small
/// because its weights count toward the compressed size.
pub fn private_model_config(cfg: &CompressionConfig) -> ModelConfig {
    ModelConfig {
        vocab: cfg.vocab(),
        context: 1,
        embed_dim: 2,
        hidden_dim: 8,
        learning_rate: cfg.learning_rate,
        seed: cfg.seed ^ 0x005e_ed0f_5fa1,
    }
}

static BUNDLED_PUBLIC: &[u8] = include_bytes!("../../assets/spum.agpw");

/// The public model shipped with the crate, trained on the bundled public
/// corpus (see `examples/train_public_model.rs`). `None` if the embedded
/// weights are missing or invalid.
pub fn bundled_public_model() -> Option<&'static StaticModel> {
    static MODEL: OnceLock<Option<StaticModel>> = OnceLock::new();
    MODEL.get_or_init(|| weights::decode(BUNDLED_PUBLIC).ok()).as_ref()
}
