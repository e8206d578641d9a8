//! `AGPW` weights blob: the on-disk form of a frozen network.
//!
//! ```text
//! magic "AGPW" | version u8 | vocab u32 | context u16 | embed u16 | hidden u16
//! | learning_rate f32 bits u32 | seed u64 | weight_count u64
//! | weights (f32 LE) × weight_count | checksum u64
//! ```
//!
//! All integers little-endian. The checksum is the first eight bytes of the
//! SHA-256 of everything before it, read as a little-endian `u64`.

use sha2::{Digest, Sha256};

use super::{ModelConfig, Network, PredictorError, StaticModel};

pub const MAGIC: &[u8; 4] = b"AGPW";
pub const VERSION: u8 = 1;

fn checksum(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn encode(model: &StaticModel) -> Vec<u8> {
    let net = model.network();
    let cfg = net.config();
    let params = net.params();
    let mut out = Vec::with_capacity(40 + params.len() * 4);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(cfg.vocab as u32).to_le_bytes());
    out.extend_from_slice(&(cfg.context as u16).to_le_bytes());
    out.extend_from_slice(&(cfg.embed_dim as u16).to_le_bytes());
    out.extend_from_slice(&(cfg.hidden_dim as u16).to_le_bytes());
    out.extend_from_slice(&cfg.learning_rate.to_bits().to_le_bytes());
    out.extend_from_slice(&cfg.seed.to_le_bytes());
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for w in params {
        out.extend_from_slice(&w.to_le_bytes());
    }
    let sum = checksum(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PredictorError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| PredictorError::BadWeights("truncated weights blob".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, PredictorError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, PredictorError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, PredictorError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<StaticModel, PredictorError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(PredictorError::BadWeights("bad magic".into()));
    }
    let version = r.take(1)?[0];
    if version != VERSION {
        return Err(PredictorError::BadWeights(format!("unsupported weights version {version}")));
    }
    let cfg = ModelConfig {
        vocab: r.u32()? as usize,
        context: r.u16()? as usize,
        embed_dim: r.u16()? as usize,
        hidden_dim: r.u16()? as usize,
        learning_rate: f32::from_bits(r.u32()?),
        seed: r.u64()?,
    };
    cfg.validate()?;
    let count = r.u64()?;
    if count != cfg.parameter_count() as u64 {
        return Err(PredictorError::BadWeights(format!(
            "weight count {count} does not match configuration ({})",
            cfg.parameter_count()
        )));
    }
    let raw = r.take(count as usize * 4)?;
    let body_end = r.pos;
    let stored = r.u64()?;
    if r.pos != bytes.len() {
        return Err(PredictorError::BadWeights("trailing bytes after checksum".into()));
    }
    if stored != checksum(&bytes[..body_end]) {
        return Err(PredictorError::BadWeights("checksum mismatch".into()));
    }
    let params = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(StaticModel::freeze(Network::from_parts(cfg, params)?))
}
