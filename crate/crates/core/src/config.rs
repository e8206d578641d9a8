use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predictor::ModelConfig;
use crate::skmer::{vocab_size, MAX_WINDOW};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown mode code {0}; expected 0 (CP), 1 (TP) or 2 (BM)")]
    UnknownMode(u8),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Optimization target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Mode {
    /// Compression-ratio priority.
    Cp = 0,
    /// Throughput priority.
    Tp = 1,
    /// Balanced.
    Bm = 2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Cp, Mode::Tp, Mode::Bm];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Cp => "CP",
            Mode::Tp => "TP",
            Mode::Bm => "BM",
        }
    }
}

impl From<Mode> for u8 {
    fn from(m: Mode) -> u8 {
        m.code()
    }
}

impl TryFrom<u8> for Mode {
    type Error = ConfigError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(Mode::Cp),
            1 => Ok(Mode::Tp),
            2 => Ok(Mode::Bm),
            other => Err(ConfigError::UnknownMode(other)),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub const DEFAULT_SEED: u64 = 42;

/// The tuned parameter vector handed to the worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionConfig {
    pub stride: usize,
    pub window: usize,
    pub context: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f32,
    pub batch: usize,
    pub mode: Mode,
    pub seed: u64,
}

impl Default for CompressionConfig {
    /// Cold-start values: (3,3)-mer, c=32, 16/64 network, lr 0.02, batch 320.
    fn default() -> Self {
        Self {
            stride: 3,
            window: 3,
            context: 32,
            embed_dim: 16,
            hidden_dim: 64,
            learning_rate: 0.02,
            batch: 320,
            mode: Mode::Bm,
            seed: DEFAULT_SEED,
        }
    }
}

impl CompressionConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn vocab(&self) -> usize {
        vocab_size(self.window)
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            vocab: self.vocab(),
            context: self.context,
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.window == 0 || self.window > MAX_WINDOW {
            return bad(format!("window k={} outside 1..={MAX_WINDOW}", self.window));
        }
        if self.stride != self.window {
            return bad(format!("coding requires stride == window, got ({}, {})", self.stride, self.window));
        }
        if self.batch == 0 || self.batch > u32::MAX as usize {
            return bad(format!("batch size {} out of range", self.batch));
        }
        self.model_config().validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
