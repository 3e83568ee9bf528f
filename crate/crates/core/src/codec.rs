//! Checkpoint-sequence file format.
//!
//! Little-endian, no padding:
//!
//! ```text
//! magic "DIDM" | version u16 = 1 | layer_count u32
//! per layer: rows u32 | cols u32 | bias_len u32
//! checkpoint_count u32
//! per checkpoint, per layer: rows*cols f64 weights (row-major), bias_len f64 biases
//! ```

use crate::checkpoint::{Architecture, CheckpointError, CheckpointSequence, Layer, LayerShape, WeightCheckpoint};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"DIDM";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u16),
    #[error("input truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes after the last checkpoint")]
    Trailing(usize),
    #[error(transparent)]
    Shape(#[from] CheckpointError),
}

pub fn encode_sequence(seq: &CheckpointSequence) -> Vec<u8> {
    let arch = seq.arch();
    let mut out = Vec::with_capacity(
        14 + 12 * arch.layers().len() + 8 * arch.total_params() * seq.checkpoints().len(),
    );
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(arch.layers().len() as u32).to_le_bytes());
    for l in arch.layers() {
        for d in [l.rows, l.cols, l.bias_len] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
    }
    out.extend_from_slice(&(seq.checkpoints().len() as u32).to_le_bytes());
    for c in seq.checkpoints() {
        for l in &c.layers {
            for x in l.weights.iter().chain(&l.bias) {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(DecodeError::Truncated(self.buf.len()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, DecodeError> {
        let raw = self.take(n.checked_mul(8).ok_or(DecodeError::Truncated(self.pos))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn decode_sequence(bytes: &[u8]) -> Result<CheckpointSequence, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
    if &magic != MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(DecodeError::Version(version));
    }
    let layer_count = r.u32()? as usize;
    // 12 bytes per layer header; bail before allocating on absurd counts.
    if layer_count > bytes.len() / 12 {
        return Err(DecodeError::Truncated(bytes.len()));
    }
    let mut shapes = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let bias_len = r.u32()? as usize;
        shapes.push(LayerShape {
            rows,
            cols,
            bias_len,
        });
    }
    let arch = Architecture::new(shapes)?;
    let count = r.u32()? as usize;
    let per_ckpt = arch.total_params() * 8;
    if per_ckpt == 0 || count > bytes.len() / per_ckpt {
        return Err(DecodeError::Truncated(bytes.len()));
    }
    let mut checkpoints = Vec::with_capacity(count);
    for epoch in 0..count {
        let mut layers = Vec::with_capacity(arch.layers().len());
        for s in arch.layers() {
            let weights = r.f64s(s.rows * s.cols)?;
            let bias = r.f64s(s.bias_len)?;
            layers.push(Layer {
                rows: s.rows,
                cols: s.cols,
                weights,
                bias,
            });
        }
        checkpoints.push(WeightCheckpoint::new(epoch, layers)?);
    }
    if r.pos != bytes.len() {
        return Err(DecodeError::Trailing(bytes.len() - r.pos));
    }
    Ok(CheckpointSequence::new(arch, checkpoints)?)
}
