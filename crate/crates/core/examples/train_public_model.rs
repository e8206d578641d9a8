//! Trains the bundled public model on `assets/public_corpus.txt` and writes
//! `assets/spum.agpw`.
//!
//! cargo run --release -p agentgc-core --example train_public_model

use std::path::PathBuf;

use agentgc_core::predictor::{train_static, ModelConfig};
use agentgc_core::skmer::{encode_skmer, sanitize, vocab_size, SkmerParams};

const WINDOW: usize = 3;
const PASSES: usize = 3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let raw = std::fs::read(assets.join("public_corpus.txt"))?;
    let seq = sanitize(&raw);
    let tokens = encode_skmer(&seq.bases, SkmerParams::coding(WINDOW)?)?;
    let cfg = ModelConfig {
        vocab: vocab_size(WINDOW),
        context: 16,
        embed_dim: 16,
        hidden_dim: 64,
        learning_rate: 0.01,
        seed: 20_240_601,
    };
    let model = train_static(&tokens.tokens, cfg, PASSES)?;

    let net = model.network();
    let mut bits = 0.0;
    for i in 0..tokens.tokens.len() {
        bits -= net.predict(&tokens.tokens[..i])[tokens.tokens[i] as usize].log2();
    }
    println!("{} bases, {:.4} bits/base on the training corpus", seq.len(), bits / seq.len() as f64);

    let out = assets.join("spum.agpw");
    model.save(&out)?;
    println!("wrote {}", out.display());
    Ok(())
}
