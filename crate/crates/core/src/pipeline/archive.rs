//! `AGGC` container.
//!
//! ```text
//! magic "AGGC" | version u8 | flags u8 | s u8 | k u8 | mode u8
//! | context u16 | embed u16 | hidden u16 | learning_rate f32 bits u32
//! | batch u32 | seed u64 | m u64 | tail_len u8
//! | reset_count u16 + (pos u64, lr f32 bits u32)*
//! | exception_count u32 + (pos u64, byte u8)*
//! | sha256 [32] | sprm_len u64 + sprm blob | payload_len u64 + payload
//! ```
//!
//! All integers little-endian. Flag bit 0 marks an embedded private model,
//! bit 1 marks that the bundled public model took part in coding.

use crate::config::{CompressionConfig, Mode};
use crate::skmer::Exception;

use super::PipelineError;

pub const MAGIC: &[u8; 4] = b"AGGC";
pub const VERSION: u8 = 1;
pub const FLAG_PRIVATE: u8 = 0b01;
pub const FLAG_PUBLIC: u8 = 0b10;

/// A learning-rate reset replayed by the decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reset {
    /// Token index at which the dynamic model was reinitialized.
    pub position: u64,
    pub learning_rate: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub flags: u8,
    pub config: CompressionConfig,
    /// Input length in bytes.
    pub m: u64,
    pub tail_len: u8,
    pub resets: Vec<Reset>,
    pub exceptions: Vec<Exception>,
    pub sha256: [u8; 32],
}

impl Header {
    pub fn uses_private(&self) -> bool {
        self.flags & FLAG_PRIVATE != 0
    }

    pub fn uses_public(&self) -> bool {
        self.flags & FLAG_PUBLIC != 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub header: Header,
    pub sprm_blob: Vec<u8>,
    pub payload: Vec<u8>,
}

impl Archive {
    /// Serialized size of everything before the payload bytes.
    pub fn header_len(&self) -> usize {
        let h = &self.header;
        4 + 1 + 1 + 3 + 6 + 4 + 4 + 8 + 8 + 1
            + 2 + h.resets.len() * 12
            + 4 + h.exceptions.len() * 9
            + 32
            + 8 + self.sprm_blob.len()
            + 8
    }

    pub fn serialized_len(&self) -> usize {
        self.header_len() + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let c = &h.config;
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(h.flags);
        out.push(c.stride as u8);
        out.push(c.window as u8);
        out.push(c.mode.code());
        out.extend_from_slice(&(c.context as u16).to_le_bytes());
        out.extend_from_slice(&(c.embed_dim as u16).to_le_bytes());
        out.extend_from_slice(&(c.hidden_dim as u16).to_le_bytes());
        out.extend_from_slice(&c.learning_rate.to_bits().to_le_bytes());
        out.extend_from_slice(&(c.batch as u32).to_le_bytes());
        out.extend_from_slice(&c.seed.to_le_bytes());
        out.extend_from_slice(&h.m.to_le_bytes());
        out.push(h.tail_len);
        out.extend_from_slice(&(h.resets.len() as u16).to_le_bytes());
        for r in &h.resets {
            out.extend_from_slice(&r.position.to_le_bytes());
            out.extend_from_slice(&r.learning_rate.to_bits().to_le_bytes());
        }
        out.extend_from_slice(&(h.exceptions.len() as u32).to_le_bytes());
        for e in &h.exceptions {
            out.extend_from_slice(&e.position.to_le_bytes());
            out.push(e.byte);
        }
        out.extend_from_slice(&h.sha256);
        out.extend_from_slice(&(self.sprm_blob.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.sprm_blob);
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PipelineError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(PipelineError::BadMagic);
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(PipelineError::UnsupportedVersion(version));
        }
        let flags = r.u8()?;
        if flags & !(FLAG_PRIVATE | FLAG_PUBLIC) != 0 {
            return Err(PipelineError::Corrupt(format!("unknown flag bits {flags:#04x}")));
        }
        let stride = r.u8()? as usize;
        let window = r.u8()? as usize;
        let mode = Mode::try_from(r.u8()?).map_err(|e| PipelineError::Corrupt(e.to_string()))?;
        let config = CompressionConfig {
            stride,
            window,
            mode,
            context: r.u16()? as usize,
            embed_dim: r.u16()? as usize,
            hidden_dim: r.u16()? as usize,
            learning_rate: f32::from_bits(r.u32()?),
            batch: r.u32()? as usize,
            seed: r.u64()?,
        };
        config.validate().map_err(|e| PipelineError::Corrupt(e.to_string()))?;
        let m = r.u64()?;
        let tail_len = r.u8()?;
        let reset_count = r.u16()? as usize;
        let mut resets = Vec::with_capacity(reset_count.min(64));
        for _ in 0..reset_count {
            resets.push(Reset { position: r.u64()?, learning_rate: f32::from_bits(r.u32()?) });
        }
        let exc_count = r.u32()? as usize;
        if exc_count as u64 > m {
            return Err(PipelineError::Corrupt(format!("{exc_count} exceptions for {m} bytes")));
        }
        let mut exceptions = Vec::with_capacity(exc_count.min(bytes.len() / 9));
        for _ in 0..exc_count {
            exceptions.push(Exception { position: r.u64()?, byte: r.u8()? });
        }
        let sha256: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let sprm_len = r.u64()?;
        let sprm_blob = r.take_len(sprm_len)?.to_vec();
        let payload_len = r.u64()?;
        let payload = r.take_len(payload_len)?.to_vec();
        if r.pos != bytes.len() {
            return Err(PipelineError::Corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let header = Header { flags, config, m, tail_len, resets, exceptions, sha256 };
        if header.uses_private() == sprm_blob.is_empty() {
            return Err(PipelineError::Corrupt("private-model flag disagrees with blob".into()));
        }
        Ok(Archive { header, sprm_blob, payload })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PipelineError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or(PipelineError::Truncated)?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn take_len(&mut self, n: u64) -> Result<&'a [u8], PipelineError> {
        let n = usize::try_from(n).map_err(|_| PipelineError::Truncated)?;
        self.take(n)
    }

    fn u8(&mut self) -> Result<u8, PipelineError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, PipelineError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, PipelineError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, PipelineError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Archive {
        Archive {
            header: Header {
                flags: FLAG_PRIVATE,
                config: CompressionConfig { mode: Mode::Cp, seed: 7, ..CompressionConfig::default() },
                m: 1234,
                tail_len: 1,
                resets: vec![Reset { position: 99, learning_rate: 0.01 }],
                exceptions: vec![Exception { position: 3, byte: b'N' }, Exception { position: 800, byte: b'\n' }],
                sha256: [0xab; 32],
            },
            sprm_blob: vec![1, 2, 3],
            payload: vec![9; 17],
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let a = sample();
        let bytes = a.to_bytes();
        assert_eq!(bytes.len(), a.serialized_len());
        let back = Archive::from_bytes(&bytes).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn fixed_prefix_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"AGGC");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], FLAG_PRIVATE);
        assert_eq!(&bytes[6..9], &[3, 3, 0]);
        assert_eq!(u16::from_le_bytes([bytes[9], bytes[10]]), 32);
        assert_eq!(u64::from_le_bytes(bytes[23..31].try_into().unwrap()), 7);
        assert_eq!(u64::from_le_bytes(bytes[31..39].try_into().unwrap()), 1234);
    }

    #[test]
    fn rejects_bad_input() {
        let bytes = sample().to_bytes();
        let mut v = bytes.clone();
        v[4] = 2;
        assert_eq!(Archive::from_bytes(&v), Err(PipelineError::UnsupportedVersion(2)));
        v = bytes.clone();
        v[0] = b'Z';
        assert_eq!(Archive::from_bytes(&v), Err(PipelineError::BadMagic));
        for cut in [0, 10, 40, bytes.len() - 1] {
            assert!(Archive::from_bytes(&bytes[..cut]).is_err());
        }
        let mut long = bytes.clone();
        long.push(0);
        assert!(Archive::from_bytes(&long).is_err());
    }
}
