use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::CompressionConfig;
use crate::metrics::{self, MetricSample};

/// Per-run measurements emitted as one JSON object on the report stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub operation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    /// Wall time per phase in seconds.
    pub wall_time_s: BTreeMap<String, f64>,
    pub peak_rss_bytes: u64,
    /// `None` for empty inputs, where the ratio is undefined.
    pub cr_bits_per_base: Option<f64>,
    pub throughput_kb_s: Option<f64>,
    pub verified: bool,
    pub models: Vec<String>,
    pub resets: usize,
    pub config: CompressionConfig,
}

impl RunReport {
    pub fn total_time_s(&self) -> f64 {
        self.wall_time_s.values().sum()
    }

    pub fn sample(&self) -> MetricSample {
        MetricSample::new(self.original_bytes, self.compressed_bytes, self.total_time_s())
    }

    /// Recomputes CR and throughput from the size and time fields.
    pub fn refresh_metrics(&mut self) {
        let s = self.sample();
        self.cr_bits_per_base = metrics::compression_ratio(&s).ok();
        self.throughput_kb_s = metrics::throughput(&s).ok();
    }

    /// Copy with every timing- and host-dependent field cleared, for
    /// comparing runs.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        for v in r.wall_time_s.values_mut() {
            *v = 0.0;
        }
        r.peak_rss_bytes = 0;
        r.throughput_kb_s = None;
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Peak resident set size of this process in bytes, or 0 when unknown.
pub fn peak_rss_bytes() -> u64 {
    #[cfg(unix)]
    {
        let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
        // SAFETY: getrusage only writes into the provided struct.
        let rc = unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut usage) };
        if rc == 0 {
            let raw = usage.ru_maxrss.max(0) as u64;
            return if cfg!(target_os = "macos") { raw } else { raw * 1024 };
        }
    }
    0
}
