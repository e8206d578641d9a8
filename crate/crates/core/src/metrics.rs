//! Compression ratio, throughput and robustness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("original size is zero")]
    EmptyOriginal,
    #[error("elapsed time must be positive and finite, got {0}")]
    NonPositiveTime(f64),
    #[error("robustness needs at least two values, got {0}")]
    TooFewValues(usize),
    #[error("mean compression ratio is zero")]
    ZeroMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    pub total_time_s: f64,
}

impl MetricSample {
    pub fn new(original_bytes: u64, compressed_bytes: u64, total_time_s: f64) -> Self {
        Self { original_bytes, compressed_bytes, total_time_s }
    }
}

/// Bits per base: `compressed / original × 8`.
pub fn compression_ratio(s: &MetricSample) -> Result<f64, MetricsError> {
    if s.original_bytes == 0 {
        return Err(MetricsError::EmptyOriginal);
    }
    Ok(s.compressed_bytes as f64 / s.original_bytes as f64 * 8.0)
}

/// KB/s with `KB = 1024` bytes.
pub fn throughput(s: &MetricSample) -> Result<f64, MetricsError> {
    if !(s.total_time_s > 0.0) || !s.total_time_s.is_finite() {
        return Err(MetricsError::NonPositiveTime(s.total_time_s));
    }
    Ok(s.original_bytes as f64 / 1024.0 / s.total_time_s)
}

/// Throughput over a set of files from the summed sizes and summed times,
/// not the mean of per-file rates.
pub fn overall_throughput(samples: &[MetricSample]) -> Result<f64, MetricsError> {
    let bytes: u64 = samples.iter().map(|s| s.original_bytes).sum();
    let time: f64 = samples.iter().map(|s| s.total_time_s).sum();
    throughput(&MetricSample::new(bytes, 0, time))
}

/// Coefficient of variation of compression ratios, in percent, using the
/// sample standard deviation (divisor `N − 1`).
pub fn robustness(crs: &[f64]) -> Result<f64, MetricsError> {
    let n = crs.len();
    if n < 2 {
        return Err(MetricsError::TooFewValues(n));
    }
    let mean = crs.iter().sum::<f64>() / n as f64;
    if mean == 0.0 {
        return Err(MetricsError::ZeroMean);
    }
    let ss: f64 = crs.iter().map(|c| (c - mean) * (c - mean)).sum();
    Ok((ss / (n - 1) as f64).sqrt() / mean * 100.0)
}
