//! Tagged, length-prefixed binary sections.
//!
//! A file is a sequence of sections `tag[8] | u32 body_len | body`. Inside a
//! body, variable-length items carry a u32 length prefix; points are
//! compressed and scalars are 32 bytes little-endian.

use crate::ProtocolError;
use didm_crypto::curve::{g1_from_bytes, g1_to_bytes, g2_from_bytes, g2_to_bytes, scalar_from_bytes, scalar_to_bytes};
use didm_crypto::{G1Affine, G2Affine, Scalar};

pub type SectionTag = [u8; 8];

pub const TAG_PPARAMS: SectionTag = *b"PPARAMS\0";
pub const TAG_ADDRKEYS: SectionTag = *b"ADDRKEYS";
pub const TAG_IRRECORD: SectionTag = *b"IRRECORD";
pub const TAG_INNERPRF: SectionTag = *b"INNERPRF";
pub const TAG_OUTERPRF: SectionTag = *b"OUTERPRF";
pub const TAG_PROOFKEY: SectionTag = *b"PROOFKEY";
pub const TAG_TRANSACT: SectionTag = *b"TRANSACT";

pub const KNOWN_TAGS: [SectionTag; 7] = [
    TAG_PPARAMS,
    TAG_ADDRKEYS,
    TAG_IRRECORD,
    TAG_INNERPRF,
    TAG_OUTERPRF,
    TAG_PROOFKEY,
    TAG_TRANSACT,
];

pub fn tag_name(tag: &SectionTag) -> String {
    String::from_utf8_lossy(tag).trim_end_matches('\0').to_string()
}

#[derive(Debug, Default)]
pub struct Enc {
    buf: Vec<u8>,
}

impl Enc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn raw(&mut self, b: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(b);
        self
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.u32(b.len() as u32).raw(b)
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.bytes(s.as_bytes())
    }

    pub fn scalar(&mut self, s: &Scalar) -> &mut Self {
        self.raw(&scalar_to_bytes(s))
    }

    pub fn g1(&mut self, p: &G1Affine) -> &mut Self {
        self.raw(&g1_to_bytes(p))
    }

    pub fn g2(&mut self, p: &G2Affine) -> &mut Self {
        self.raw(&g2_to_bytes(p))
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Dec<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn truncated(what: &str, pos: usize) -> ProtocolError {
    ProtocolError::Encoding(format!("truncated {what} at byte {pos}"))
}

impl<'a> Dec<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8], ProtocolError> {
        if self.buf.len() - self.pos < n {
            return Err(truncated("field", self.pos));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn array<const N: usize>(&mut self) -> Result<[u8; N], ProtocolError> {
        Ok(self.raw(N)?.try_into().unwrap())
    }

    pub fn u8(&mut self) -> Result<u8, ProtocolError> {
        Ok(self.raw(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, ProtocolError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    pub fn u32(&mut self) -> Result<u32, ProtocolError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub fn u64(&mut self) -> Result<u64, ProtocolError> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    pub fn f64(&mut self) -> Result<f64, ProtocolError> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], ProtocolError> {
        let n = self.u32()? as usize;
        self.raw(n)
    }

    pub fn str(&mut self) -> Result<String, ProtocolError> {
        String::from_utf8(self.bytes()?.to_vec()).map_err(|e| ProtocolError::Encoding(format!("string: {e}")))
    }

    pub fn scalar(&mut self) -> Result<Scalar, ProtocolError> {
        Ok(scalar_from_bytes(self.raw(32)?)?)
    }

    pub fn g1(&mut self) -> Result<G1Affine, ProtocolError> {
        Ok(g1_from_bytes(self.raw(48)?)?)
    }

    pub fn g2(&mut self) -> Result<G2Affine, ProtocolError> {
        Ok(g2_from_bytes(self.raw(96)?)?)
    }

    /// Element count for a list whose items take at least `min_item` bytes,
    /// rejected early if the remaining input cannot hold it.
    pub fn count(&mut self, min_item: usize) -> Result<usize, ProtocolError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item.max(1)) > self.remaining() {
            return Err(truncated("list", self.pos));
        }
        Ok(n)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(self) -> Result<(), ProtocolError> {
        if self.remaining() != 0 {
            return Err(ProtocolError::Encoding(format!("{} trailing bytes", self.remaining())));
        }
        Ok(())
    }
}

pub fn write_section(out: &mut Vec<u8>, tag: SectionTag, body: &[u8]) {
    out.extend_from_slice(&tag);
    out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    out.extend_from_slice(body);
}

pub fn section(tag: SectionTag, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + body.len());
    write_section(&mut out, tag, body);
    out
}

/// Splits a file into its sections.
pub fn read_sections(bytes: &[u8]) -> Result<Vec<(SectionTag, &[u8])>, ProtocolError> {
    let mut d = Dec::new(bytes);
    let mut out = Vec::new();
    while d.remaining() > 0 {
        let tag: SectionTag = d.array()?;
        let body = d.bytes()?;
        out.push((tag, body));
    }
    Ok(out)
}

/// Body of the only section in `bytes`, which must carry `tag`.
pub fn expect_section(bytes: &[u8], tag: SectionTag) -> Result<&[u8], ProtocolError> {
    let sections = read_sections(bytes)?;
    match sections.as_slice() {
        [(t, body)] if *t == tag => Ok(body),
        [(t, _)] => Err(ProtocolError::Encoding(format!(
            "expected a {} section, found {}",
            tag_name(&tag),
            tag_name(t)
        ))),
        _ => Err(ProtocolError::Encoding(format!(
            "expected exactly one {} section, found {}",
            tag_name(&tag),
            sections.len()
        ))),
    }
}
