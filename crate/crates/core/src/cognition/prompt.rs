//! Few-shot prompt for the parameter-choosing model.

use std::fmt::Write;

use crate::config::Mode;

use super::retrieval::{Retrieved, TuningQuery};

pub fn mode_directive(mode: Mode) -> &'static str {
    match mode {
        Mode::Cp => "Mode 0 (CP): minimize the compression ratio; the file is kept for a long time, so use the least disk space even if compression is slow.",
        Mode::Tp => "Mode 1 (TP): maximize throughput; the file must be compressed as soon as possible.",
        Mode::Bm => "Mode 2 (BM): balance compression ratio, throughput and memory use.",
    }
}

pub const RECORD_PREFIX: &str = "record ";

fn fmt_values(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn build_prompt(records: &[Retrieved], query: &TuningQuery) -> String {
    let mut p = String::new();
    p.push_str("You are ParamsChoose, an agent that chooses the best compression parameters for a DNA file from its features, the memory budget and similar past runs.\n");
    let _ = writeln!(p, "{}", mode_directive(query.mode));
    let _ = writeln!(
        p,
        "Memory budget: {} bytes ({} KB), {:.1}% of available memory.",
        query.budget_bytes,
        query.budget_bytes / 1024,
        query.alpha * 100.0
    );
    let hist = query.beta.histogram();
    let mut top: Vec<(usize, f64)> = hist.iter().copied().enumerate().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: Vec<String> = top.iter().take(4).map(|(i, f)| format!("{}:{f:.4}", kmer_label(*i, query.beta.window()))).collect();
    let _ = writeln!(
        p,
        "File features: about {:.0} bases (log10 size {:.4}); most frequent {}-mers {}.",
        query.beta.approx_len(),
        query.beta.size_feature(),
        query.beta.window(),
        top.join(", ")
    );
    let _ = writeln!(p, "The {} most similar past runs:", records.len());
    for (i, r) in records.iter().enumerate() {
        let rec = &r.record;
        let _ = writeln!(
            p,
            "{RECORD_PREFIX}{}: context-length={}; GPU-Mem(KB)={}; data-vector={}; AMKLCF_Parameters={{\"embed_dim\": {}, \"hidden_dim\": {}, \"learning_rate\": {}}}; CR={}; Throughput(KB/s)={}; BatchSize={}",
            i + 1,
            rec.context,
            rec.peak_mem_bytes / 1024,
            fmt_values(&rec.beta.values),
            rec.embed_dim,
            rec.hidden_dim,
            rec.learning_rate,
            rec.cr_bits_per_base,
            rec.thp_kb_s,
            rec.batch
        );
    }
    p.push_str("Note that the smaller CR, the better, and the larger Throughput, the better.\n");
    p.push_str("Every value you choose must lie between the minimum and maximum of the records above, and the memory need must fit the budget.\n");
    let _ = writeln!(
        p,
        "Return only a JSON object with the keys \"context-length\", \"GPU-Mem(KB)\", \"AMKLCF_Parameters\" (an object with embed_dim, hidden_dim, learning_rate), \"BatchSize\" and \"mode\" (use {}).",
        query.mode.code()
    );
    p
}

fn kmer_label(index: usize, k: usize) -> String {
    (0..k).rev().map(|u| b"ACGT"[(index >> (2 * u)) & 3] as char).collect()
}
