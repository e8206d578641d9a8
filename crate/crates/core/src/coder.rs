//! 32-bit range coder with byte renormalization over 16-bit quantized
//! frequency tables.
//!
//! The coder holds no statistics of its own; every symbol is coded against a
//! [`ProbabilityVector`] supplied by the caller, and the decoder must be fed
//! the bit-identical vector for the same position.

use thiserror::Error;

pub const PROB_BITS: u32 = 16;
pub const PROB_TOTAL: u32 = 1 << PROB_BITS;

const TOP: u64 = 1 << 32;
const RENORM: u32 = 1 << 24;

#[derive(Debug, Error, PartialEq)]
pub enum CoderError {
    #[error("probability vector is empty")]
    Empty,
    #[error("{0} symbols cannot each receive a nonzero share of {PROB_TOTAL}")]
    TooManySymbols(usize),
    #[error("probability vector has no mass or contains a negative/non-finite entry")]
    InvalidPdf,
    #[error("symbol {symbol} outside alphabet of {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
}

/// Quantized coding distribution: `freqs` sum to exactly `2^16`, each ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityVector {
    freqs: Vec<u32>,
    cumulative: Vec<u32>,
}

impl ProbabilityVector {
    pub fn from_freqs(freqs: Vec<u32>) -> Result<Self, CoderError> {
        if freqs.is_empty() {
            return Err(CoderError::Empty);
        }
        if freqs.contains(&0) || freqs.iter().map(|&f| f as u64).sum::<u64>() != PROB_TOTAL as u64 {
            return Err(CoderError::InvalidPdf);
        }
        let mut cumulative = Vec::with_capacity(freqs.len() + 1);
        let mut acc = 0u32;
        cumulative.push(0);
        for &f in &freqs {
            acc += f;
            cumulative.push(acc);
        }
        Ok(Self { freqs, cumulative })
    }

    /// Equal counts over `n` symbols (the bootstrap distribution).
    pub fn uniform(n: usize) -> Result<Self, CoderError> {
        quantize(&vec![1.0; n])
    }

    pub fn freqs(&self) -> &[u32] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Ideal code length of `symbol` under this table, in bits.
    pub fn cost_bits(&self, symbol: usize) -> f64 {
        -(self.freqs[symbol] as f64 / PROB_TOTAL as f64).log2()
    }

    fn symbol_for(&self, target: u32) -> usize {
        // first index whose cumulative upper bound exceeds target
        self.cumulative[1..].partition_point(|&c| c <= target)
    }
}

/// Largest-remainder apportionment of `2^16` counts with a floor of one count
/// per symbol. Remainder ties go to the lower symbol index.
pub fn quantize(pdf: &[f64]) -> Result<ProbabilityVector, CoderError> {
    let n = pdf.len();
    if n == 0 {
        return Err(CoderError::Empty);
    }
    if n > PROB_TOTAL as usize {
        return Err(CoderError::TooManySymbols(n));
    }
    if pdf.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(CoderError::InvalidPdf);
    }
    let sum: f64 = pdf.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(CoderError::InvalidPdf);
    }
    let spare = (PROB_TOTAL as usize - n) as f64;
    let mut freqs = Vec::with_capacity(n);
    let mut remainders = Vec::with_capacity(n);
    let mut assigned = 0u64;
    for &p in pdf {
        let exact = p / sum * spare;
        let whole = exact.floor();
        freqs.push(1 + whole as u32);
        remainders.push(exact - whole);
        assigned += whole as u64;
    }
    let mut leftover = spare as u64 - assigned.min(spare as u64);
    if leftover > 0 {
        let mut order: Vec<usize> = (0..n).collect();
        // stable sort keeps lower indices first among equal remainders
        order.sort_by(|&a, &b| remainders[b].total_cmp(&remainders[a]));
        for &i in order.iter().cycle() {
            if leftover == 0 {
                break;
            }
            freqs[i] += 1;
            leftover -= 1;
        }
    }
    // floating rounding can overshoot by a count or two; take it back from the largest
    let mut total: u64 = freqs.iter().map(|&f| f as u64).sum();
    while total > PROB_TOTAL as u64 {
        let (i, _) = freqs.iter().enumerate().fold((0, 0), |best, (i, &f)| if f > best.1 { (i, f) } else { best });
        freqs[i] -= 1;
        total -= 1;
    }
    ProbabilityVector::from_freqs(freqs)
}

#[derive(Debug, Clone)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self { low: 0, range: u32::MAX, out: Vec::new() }
    }

    fn carry(&mut self) {
        for byte in self.out.iter_mut().rev() {
            let (v, overflow) = byte.overflowing_add(1);
            *byte = v;
            if !overflow {
                return;
            }
        }
    }

    pub fn encode(&mut self, pv: &ProbabilityVector, symbol: usize) -> Result<(), CoderError> {
        if symbol >= pv.len() {
            return Err(CoderError::SymbolOutOfRange { symbol, size: pv.len() });
        }
        let r = self.range >> PROB_BITS;
        self.low += r as u64 * pv.cumulative[symbol] as u64;
        self.range = r * pv.freqs[symbol];
        if self.low >= TOP {
            self.low -= TOP;
            self.carry();
        }
        while self.range < RENORM {
            self.out.push((self.low >> 24) as u8);
            self.low = (self.low << 8) & (TOP - 1);
            self.range <<= 8;
        }
        Ok(())
    }

    /// Emits the shortest byte suffix (at most 4 bytes) that pins a value
    /// inside the final interval once the decoder zero-pads it.
    pub fn finish(mut self) -> Vec<u8> {
        let hi = self.low + self.range as u64;
        let mut shift = 32u32;
        let value = loop {
            let unit = 1u64 << shift;
            let candidate = self.low.div_ceil(unit) * unit;
            if candidate < hi {
                break candidate;
            }
            shift -= 8;
        };
        let mut value = value;
        if value >= TOP {
            value -= TOP;
            self.carry();
        }
        let emit = (32 - shift) / 8;
        for i in 0..emit {
            self.out.push((value >> (24 - 8 * i)) as u8);
        }
        self.out
    }

    pub fn bytes_written(&self) -> usize {
        self.out.len()
    }
}

/// Decoder mirror of [`RangeEncoder`]. Reads past the payload end as zero
/// bytes and never fails on malformed input; integrity is checked by the
/// container hash.
#[derive(Debug, Clone)]
pub struct RangeDecoder<'a> {
    input: &'a [u8],
    pos: usize,
    range: u32,
    // code value minus the interval's low end
    offset: u32,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Self {
        let mut d = Self { input, pos: 0, range: u32::MAX, offset: 0 };
        for _ in 0..4 {
            d.offset = (d.offset << 8) | d.next_byte() as u32;
        }
        d
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.input.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    /// Bytes consumed beyond the end of the payload.
    pub fn overrun(&self) -> usize {
        self.pos.saturating_sub(self.input.len())
    }

    pub fn decode(&mut self, pv: &ProbabilityVector) -> usize {
        let r = self.range >> PROB_BITS;
        let target = (self.offset / r).min(PROB_TOTAL - 1);
        let symbol = pv.symbol_for(target);
        let start = r * pv.cumulative[symbol];
        let width = r * pv.freqs[symbol];
        self.offset -= start;
        if self.offset >= width {
            // only reachable on a corrupt payload
            self.offset = width - 1;
        }
        self.range = width;
        while self.range < RENORM {
            self.offset = (self.offset << 8) | self.next_byte() as u32;
            self.range <<= 8;
        }
        symbol
    }
}
