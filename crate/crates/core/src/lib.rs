//! Agent-tuned, learning-based lossless compressor for DNA sequences.

pub mod coder;
pub mod config;
pub mod metrics;
pub mod predictor;
pub mod skmer;
pub mod pipeline;
pub mod cognition;
pub mod agent;
