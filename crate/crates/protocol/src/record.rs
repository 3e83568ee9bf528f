//! Identity records and their commitments.

use crate::codec::{read_sections, section, Dec, Enc, TAG_IRRECORD};
use crate::params::{PublicParams, IR_HEADER_SCALARS};
use crate::ProtocolError;
use didm_core::predicate::{PredicateConfig, PredicateKind};
use didm_core::{quantize, Architecture, CheckpointSequence, LayerShape, WeightCheckpoint};
use didm_crypto::curve::g1_to_bytes;
use didm_crypto::{crh_bytes, crh_val, cs_commit, tag, Commitment, OpCounter, Scalar, Tag};
use sha2::{Digest, Sha256};

pub const TAG_OWNER: Tag = tag("owner");
pub const TAG_PREDICATE: Tag = tag("predicate");
pub const TAG_CP_RAND: Tag = tag("cp-rand");

#[derive(Debug, Clone, PartialEq)]
pub struct IrAux {
    pub cr_kp: Scalar,
    pub scale_bits: u32,
    /// SHA-256 over the SRS seed and degree the record was committed under.
    pub acs_params: [u8; 32],
}

/// `IR_i = (CP_i, IRPK, W_i, (Φ_CWCD, Φ_IWFW, Φ_MWCD), AUX)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRecord {
    pub index: usize,
    pub cp: Commitment,
    pub irpk: Commitment,
    pub w: WeightCheckpoint,
    /// Digests of the CWCD, IWFW and MWCD policies, in that order.
    pub predicate_ids: [Scalar; 3],
    pub aux: IrAux,
}

pub fn predicate_ids(pp: &PublicParams, cfg: &PredicateConfig) -> [Scalar; 3] {
    PredicateKind::ALL.map(|k| crh_bytes(&pp.hash, &TAG_PREDICATE, &cfg.descriptor(k)))
}

pub fn owner_digest(pp: &PublicParams, irpk: &Commitment) -> Scalar {
    crh_bytes(&pp.hash, &TAG_OWNER, &g1_to_bytes(&irpk.0))
}

/// Commitment randomness for record `index`: a hash of `cr_kp` and the
/// index, so records of one owner do not share randomness.
pub fn cp_randomness(pp: &PublicParams, cr_kp: &Scalar, index: usize) -> Scalar {
    crh_val(&pp.hash, &TAG_CP_RAND, &[*cr_kp, Scalar::from(index as u64)])
}

pub fn acs_params_digest(pp: &PublicParams) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(pp.srs.seed());
    h.update((pp.degree() as u64).to_le_bytes());
    h.finalize().into()
}

/// Committed message `h(IRPK) ‖ quantize(flatten(W)) ‖ predicate ids`.
pub fn ir_message(
    pp: &PublicParams,
    irpk: &Commitment,
    w: &WeightCheckpoint,
    ids: &[Scalar; 3],
    scale_bits: u32,
) -> Result<Vec<Scalar>, ProtocolError> {
    let q = quantize::<Scalar>(&w.flatten(), scale_bits)?;
    if q.values.len() + IR_HEADER_SCALARS > pp.commit.capacity() {
        return Err(ProtocolError::Params(format!(
            "model has {} parameters but pp supports at most {}",
            q.values.len(),
            pp.max_total_w
        )));
    }
    let mut m = Vec::with_capacity(q.values.len() + IR_HEADER_SCALARS);
    m.push(owner_digest(pp, irpk));
    m.extend(q.values);
    m.extend_from_slice(ids);
    Ok(m)
}

/// Coefficients of the polynomial a record commitment also commits to:
/// the message in the low coefficients and the randomness at `X^D`.
pub fn ir_polynomial(pp: &PublicParams, msg: &[Scalar], r: &Scalar) -> Vec<Scalar> {
    let mut p = vec![Scalar::from(0u64); pp.degree() + 1];
    p[..msg.len()].copy_from_slice(msg);
    p[pp.degree()] = *r;
    p
}

pub fn ir_gen(
    pp: &PublicParams,
    irpk: &Commitment,
    seq: &CheckpointSequence,
    cfg: &PredicateConfig,
    cr_kp: &Scalar,
    scale_bits: u32,
) -> Result<(Vec<IdentityRecord>, Vec<Commitment>), ProtocolError> {
    let ids = predicate_ids(pp, cfg);
    let acs_params = acs_params_digest(pp);
    let ops = &mut OpCounter::new();
    let mut records = Vec::with_capacity(seq.checkpoints().len());
    for (i, w) in seq.checkpoints().iter().enumerate() {
        let m = ir_message(pp, irpk, w, &ids, scale_bits)?;
        let cp = cs_commit(&pp.commit, &m, &cp_randomness(pp, cr_kp, i), ops)?;
        records.push(IdentityRecord {
            index: i,
            cp,
            irpk: *irpk,
            w: w.clone(),
            predicate_ids: ids,
            aux: IrAux {
                cr_kp: *cr_kp,
                scale_bits,
                acs_params,
            },
        });
    }
    let cps = records.iter().map(|r| r.cp).collect();
    Ok((records, cps))
}

impl IdentityRecord {
    fn encode_body(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.u32(self.index as u32).g1(&self.cp.0).g1(&self.irpk.0);
        for id in &self.predicate_ids {
            e.scalar(id);
        }
        e.scalar(&self.aux.cr_kp).u32(self.aux.scale_bits).raw(&self.aux.acs_params);
        e.u32(self.w.epoch as u32).u32(self.w.layers.len() as u32);
        for l in &self.w.layers {
            e.u32(l.rows as u32).u32(l.cols as u32);
        }
        for x in self.w.flatten() {
            e.f64(x);
        }
        e.finish()
    }

    fn decode_body(body: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(body);
        let index = d.u32()? as usize;
        let cp = Commitment(d.g1()?);
        let irpk = Commitment(d.g1()?);
        let predicate_ids = [d.scalar()?, d.scalar()?, d.scalar()?];
        let aux = IrAux {
            cr_kp: d.scalar()?,
            scale_bits: d.u32()?,
            acs_params: d.array()?,
        };
        let epoch = d.u32()? as usize;
        let n = d.count(8)?;
        let shapes = (0..n)
            .map(|_| Ok(LayerShape::dense(d.u32()? as usize, d.u32()? as usize)))
            .collect::<Result<Vec<_>, ProtocolError>>()?;
        let arch = Architecture::new(shapes)?;
        let flat = (0..arch.total_params()).map(|_| d.f64()).collect::<Result<Vec<_>, _>>()?;
        d.finish()?;
        Ok(Self {
            index,
            cp,
            irpk,
            w: WeightCheckpoint::from_flat(&arch, epoch, &flat)?,
            predicate_ids,
            aux,
        })
    }
}

/// One IRRECORD section per record.
pub fn encode_records(records: &[IdentityRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        out.extend(section(TAG_IRRECORD, &r.encode_body()));
    }
    out
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<IdentityRecord>, ProtocolError> {
    read_sections(bytes)?
        .into_iter()
        .map(|(t, body)| {
            if t != TAG_IRRECORD {
                return Err(ProtocolError::Encoding("non-IRRECORD section in record file".into()));
            }
            IdentityRecord::decode_body(body)
        })
        .collect()
}
