//! Builds `assets/params_results.csv`, the seed parameter database, by
//! compressing 112 inputs drawn from the public corpus and from synthetic
//! generators under varied configurations and recording the results.
//!
//! cargo run --release -p agentgc-core --example build_seed_db

use std::path::PathBuf;

use agentgc_core::cognition::{ParameterRecord, VectorDatabase};
use agentgc_core::config::{CompressionConfig, Mode};
use agentgc_core::pipeline::compress;
use agentgc_core::skmer::{data_vector, sanitize};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RECORDS: usize = 112;

fn random_bases(rng: &mut ChaCha8Rng, n: usize, weights: [f64; 4]) -> Vec<u8> {
    let total: f64 = weights.iter().sum();
    (0..n)
        .map(|_| {
            let mut x = rng.gen::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if x < *w {
                    return b"ACGT"[i];
                }
                x -= w;
            }
            b'T'
        })
        .collect()
}

fn markov(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let table: Vec<[f64; 4]> = (0..16).map(|_| [0; 4].map(|_: i32| rng.gen::<f64>().powi(2) + 0.02)).collect();
    let mut out = random_bases(rng, 2, [1.0; 4]);
    let idx = |b: u8| b"ACGT".iter().position(|&x| x == b).unwrap();
    while out.len() < n {
        let ctx = idx(out[out.len() - 2]) * 4 + idx(out[out.len() - 1]);
        let next = random_bases(rng, 1, table[ctx])[0];
        out.push(next);
    }
    out
}

fn repeats(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let len = rng.gen_range(50..2000);
    let unit = random_bases(rng, len, [1.0; 4]);
    let rate = rng.gen_range(0.01..0.15);
    unit.iter()
        .cycle()
        .take(n)
        .map(|&b| if rng.gen::<f64>() < rate { b"ACGT"[rng.gen_range(0..4)] } else { b })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let corpus = std::fs::read(assets.join("public_corpus.txt"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut db = VectorDatabase { records: Vec::new(), path: Some(assets.join("params_results.csv")) };

    let contexts = [4, 8, 12, 16, 24, 32, 48, 64];
    let shapes = [(4, 16), (8, 32), (8, 64), (16, 32), (16, 64), (16, 96), (24, 128)];
    let rates = [0.005f32, 0.01, 0.02, 0.03];
    let batches = [32, 64, 128, 320, 512, 1024];

    for i in 0..RECORDS {
        let n = (2f64.powf(rng.gen_range(12.0..17.6))) as usize;
        let raw = match i % 5 {
            0 | 1 => {
                let n = n.min(corpus.len());
                let start = rng.gen_range(0..=corpus.len() - n);
                corpus[start..start + n].to_vec()
            }
            2 => markov(&mut rng, n),
            3 => repeats(&mut rng, n),
            _ => {
                let gc = rng.gen_range(0.3..0.7);
                random_bases(&mut rng, n, [1.0 - gc, gc, gc, 1.0 - gc])
            }
        };
        let (e, h) = *shapes.choose(&mut rng).unwrap();
        let cfg = CompressionConfig {
            context: *contexts.choose(&mut rng).unwrap(),
            embed_dim: e,
            hidden_dim: h,
            learning_rate: *rates.choose(&mut rng).unwrap(),
            batch: *batches.choose(&mut rng).unwrap(),
            mode: *Mode::ALL.choose(&mut rng).unwrap(),
            ..CompressionConfig::default()
        };
        let (_, report) = compress(&raw, &cfg)?;
        let beta = data_vector(&sanitize(&raw), cfg.window)?;
        let rec = ParameterRecord::from_run(&cfg, beta, &report).ok_or("run produced no metrics")?;
        println!(
            "{:3} n={:6} c={:2} e={:2} h={:3} lr={} z={:4} {}: cr {:.4} thp {:.1} KB/s",
            i, n, cfg.context, e, h, cfg.learning_rate, cfg.batch, cfg.mode, rec.cr_bits_per_base, rec.thp_kb_s
        );
        db.records.push(rec);
    }
    db.save()?;
    println!("wrote {} records", db.len());
    Ok(())
}
