//! Byte-exact ingestion of genomic input and (s,k)-mer tokenization.
//!
//! Raw bytes are split into a base stream over `{A,C,G,T}` and a side
//! channel of exceptions holding every other byte, so arbitrary files survive
//! a round trip while the token vocabulary stays at `4^k`.

use thiserror::Error;

/// Largest supported window; `4^8 = 65536` token ids fit in 16 bits.
pub const MAX_WINDOW: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SkmerError {
    #[error("window k={0} outside 1..={MAX_WINDOW}")]
    InvalidWindow(usize),
    #[error("stride {stride} must be positive and equal the window {window} for coding")]
    UnsupportedStride { stride: usize, window: usize },
    #[error("token {token} out of range for vocabulary {vocab}")]
    TokenOutOfRange { token: u32, vocab: usize },
    #[error("exception at position {position} outside sequence of length {len}")]
    ExceptionOutOfRange { position: u64, len: usize },
    #[error("exception positions are not strictly increasing at {0}")]
    ExceptionOrder(u64),
    #[error("token stream covers {covered} bases but {expected} were declared")]
    LengthMismatch { covered: usize, expected: usize },
}

#[inline]
fn base_index(byte: u8) -> Option<u8> {
    match byte {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

const BASE_BYTES: [u8; 4] = *b"ACGT";

/// One byte that is not in the exact `{A,C,G,T}` alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exception {
    pub position: u64,
    pub byte: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenomeSequence {
    /// Base indices, `A=0, C=1, G=2, T=3`; exception slots hold `0`.
    pub bases: Vec<u8>,
    pub exceptions: Vec<Exception>,
}

impl GenomeSequence {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkmerParams {
    pub stride: usize,
    pub window: usize,
}

impl SkmerParams {
    pub fn new(stride: usize, window: usize) -> Result<Self, SkmerError> {
        if window == 0 || window > MAX_WINDOW {
            return Err(SkmerError::InvalidWindow(window));
        }
        if stride == 0 {
            return Err(SkmerError::UnsupportedStride { stride, window });
        }
        Ok(Self { stride, window })
    }

    /// Non-overlapping (k,k)-mer, the only configuration used for coding.
    pub fn coding(window: usize) -> Result<Self, SkmerError> {
        Self::new(window, window)
    }

    pub fn vocab(&self) -> usize {
        vocab_size(self.window)
    }

    fn check_coding(&self) -> Result<(), SkmerError> {
        if self.stride != self.window {
            return Err(SkmerError::UnsupportedStride { stride: self.stride, window: self.window });
        }
        if self.window == 0 || self.window > MAX_WINDOW {
            return Err(SkmerError::InvalidWindow(self.window));
        }
        Ok(())
    }
}

pub fn vocab_size(window: usize) -> usize {
    1usize << (2 * window)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<u32>,
    /// Bases in the final window that came from the input; `0` when the
    /// last window is full.
    pub tail_len: usize,
    pub source_len: usize,
}

/// Splits raw bytes into bases and exceptions. Total: never fails.
pub fn sanitize(raw: &[u8]) -> GenomeSequence {
    let mut bases = Vec::with_capacity(raw.len());
    let mut exceptions = Vec::new();
    for (i, &b) in raw.iter().enumerate() {
        match base_index(b) {
            Some(v) => bases.push(v),
            None => {
                bases.push(0);
                exceptions.push(Exception { position: i as u64, byte: b });
            }
        }
    }
    GenomeSequence { bases, exceptions }
}

pub fn desanitize(seq: &GenomeSequence) -> Result<Vec<u8>, SkmerError> {
    let mut out: Vec<u8> = seq.bases.iter().map(|&b| BASE_BYTES[(b & 3) as usize]).collect();
    let mut prev: Option<u64> = None;
    for e in &seq.exceptions {
        if prev.is_some_and(|p| e.position <= p) {
            return Err(SkmerError::ExceptionOrder(e.position));
        }
        let slot = out
            .get_mut(e.position as usize)
            .ok_or(SkmerError::ExceptionOutOfRange { position: e.position, len: seq.bases.len() })?;
        *slot = e.byte;
        prev = Some(e.position);
    }
    Ok(out)
}

/// Number of tokens produced for `m` bases under a coding (k,k)-mer.
pub fn token_count(m: usize, window: usize) -> usize {
    m.div_ceil(window)
}

pub fn encode_skmer(bases: &[u8], p: SkmerParams) -> Result<TokenSequence, SkmerError> {
    p.check_coding()?;
    let k = p.window;
    let mut tokens = Vec::with_capacity(token_count(bases.len(), k));
    for block in bases.chunks(k) {
        let mut t = 0u32;
        for u in 0..k {
            // short final block is padded with A (index 0)
            let b = block.get(u).copied().unwrap_or(0) as u32;
            t = (t << 2) | (b & 3);
        }
        tokens.push(t);
    }
    Ok(TokenSequence { tokens, tail_len: bases.len() % k, source_len: bases.len() })
}

pub fn decode_skmer(t: &TokenSequence, p: SkmerParams) -> Result<Vec<u8>, SkmerError> {
    p.check_coding()?;
    let k = p.window;
    let vocab = p.vocab();
    let expected = token_count(t.source_len, k);
    if t.tokens.len() != expected {
        return Err(SkmerError::LengthMismatch { covered: t.tokens.len() * k, expected: t.source_len });
    }
    let mut bases = Vec::with_capacity(t.tokens.len() * k);
    for &tok in &t.tokens {
        if tok as usize >= vocab {
            return Err(SkmerError::TokenOutOfRange { token: tok, vocab });
        }
        for u in (0..k).rev() {
            bases.push(((tok >> (2 * u)) & 3) as u8);
        }
    }
    bases.truncate(t.source_len);
    Ok(bases)
}

/// Normalized non-overlapping k-mer histogram followed by `log10(max(m,1))`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DataVector {
    pub values: Vec<f64>,
}

impl DataVector {
    pub fn window(&self) -> usize {
        // values.len() == 4^k + 1
        let v = self.values.len().saturating_sub(1);
        (v.trailing_zeros() / 2) as usize
    }

    pub fn histogram(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }

    pub fn size_feature(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Base count implied by the size feature.
    pub fn approx_len(&self) -> f64 {
        10f64.powf(self.size_feature())
    }
}

pub fn data_vector(seq: &GenomeSequence, window: usize) -> Result<DataVector, SkmerError> {
    if window == 0 || window > MAX_WINDOW {
        return Err(SkmerError::InvalidWindow(window));
    }
    let vocab = vocab_size(window);
    let mut counts = vec![0u64; vocab];
    let mut total = 0u64;
    for block in seq.bases.chunks_exact(window) {
        let t = block.iter().fold(0usize, |acc, &b| (acc << 2) | (b & 3) as usize);
        counts[t] += 1;
        total += 1;
    }
    let mut values: Vec<f64> = if total == 0 {
        vec![0.0; vocab]
    } else {
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    };
    values.push((seq.len().max(1) as f64).log10());
    Ok(DataVector { values })
}
