//! Inner proof, outer proof and verification.
//!
//! Every record commitment `CP_i` is a KZG commitment to `p_i(X)` (see
//! [`PublicParams`]). The inner prover opens every `p_i` at one transcript
//! point `z` and batches the openings with a challenge ρ drawn over
//! `(CP_i, z, v_i)`, so a verifier needs the values and the batched proof
//! `π_B` but not the individual `π_i`. The outer prover
//! folds the batched instance into an accumulator, checks the fold without
//! pairings and attests the result; the verifier repeats the fold from the
//! public data and runs the single-pairing decider.

use crate::codec::{expect_section, section, Dec, Enc, TAG_INNERPRF, TAG_OUTERPRF};
use crate::keys::{ProvingKey, VerifyingKey};
use crate::nizk::{AttestedProof, NizkBackend, TranscriptAttestation};
use crate::params::PublicParams;
use crate::record::{cp_randomness, ir_message, ir_polynomial, predicate_ids};
use crate::ProtocolError;
use didm_core::predicate::{evaluate, PredicateConfig, PredicateReport};
use didm_core::CheckpointSequence;
use didm_crypto::curve::{g1_to_bytes, scalar_to_bytes};
use didm_crypto::{
    acs_decide, acs_keygen, acs_prove, acs_verify, crh_bytes, cs_commit, cs_open, derive_challenge, derive_rho,
    digest_bytes, pc_open, rho_combination, rho_powers, tag, AccumulatorProof, AccumulatorValue, Commitment, G1Affine,
    OpCounter, OpeningInstance, Scalar, Tag,
};

pub const TAG_POINT: Tag = tag("point");
pub const TAG_REPORT: Tag = tag("report");

/// `S_inp`: the record commitments plus the public part of AUX.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerStatement {
    pub cps: Vec<Commitment>,
    pub scale_bits: u32,
}

/// `J_in`. `cr_kp` is the secret part of AUX.
#[derive(Debug, Clone)]
pub struct InnerWitness {
    pub irpk: Commitment,
    pub seq: CheckpointSequence,
    pub cfg: PredicateConfig,
    pub cr_kp: Scalar,
}

/// `π_in`: per-record openings at the common point and their batch.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProof {
    pub point: Scalar,
    /// `(v_i, π_i)` for each `CP_i`.
    pub openings: Vec<(Scalar, G1Affine)>,
    pub rho: Scalar,
    pub batched: OpeningInstance,
    pub report: PredicateReport,
    pub report_digest: [u8; 32],
}

/// `S_outp = (PCP, [CP_i])`, extended with the owner address.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterStatement {
    pub pcp: Commitment,
    pub irpk: Commitment,
    pub cps: Vec<Commitment>,
}

/// `J_out = h(vk_in)` together with the AUX randomness used for PCP.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterWitness {
    pub vk_in_digest: Scalar,
    pub cr_kp: Scalar,
    pub irpk: Commitment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterOutput {
    pub statement: OuterStatement,
    pub pi_out: AttestedProof,
    pub accu: AccumulatorValue,
    pub pi_acs: AccumulatorProof,
}

pub fn report_digest(pp: &PublicParams, report: &PredicateReport) -> [u8; 32] {
    digest_bytes(&crh_bytes(&pp.hash, &TAG_REPORT, &report.canonical_bytes()))
}

fn cps_bytes(cps: &[Commitment]) -> Vec<u8> {
    let mut e = Enc::new();
    e.u32(cps.len() as u32);
    for c in cps {
        e.g1(&c.0);
    }
    e.finish()
}

/// Transcript prefix of the inner batching step.
fn inner_context(irpk: &Commitment, report_digest: &[u8; 32]) -> Vec<u8> {
    let mut t = g1_to_bytes(&irpk.0).to_vec();
    t.extend_from_slice(report_digest);
    t
}

/// Transcript prefix of the accumulation step.
fn outer_context(vk_in_digest: &Scalar, pcp: &Commitment, irpk: &Commitment) -> Vec<u8> {
    let mut t = scalar_to_bytes(vk_in_digest).to_vec();
    t.extend_from_slice(&g1_to_bytes(&pcp.0));
    t.extend_from_slice(&g1_to_bytes(&irpk.0));
    t
}

/// The common evaluation point: a hash over all record commitments.
pub fn common_point(
    pp: &PublicParams,
    irpk: &Commitment,
    report_digest: &[u8; 32],
    cps: &[Commitment],
    ops: &mut OpCounter,
) -> Scalar {
    let mut t = inner_context(irpk, report_digest);
    t.extend(cps_bytes(cps));
    derive_challenge(&pp.hash, &TAG_POINT, &t, ops)
}

/// ρ for a set of evaluations at `point`.
pub fn batch_rho(
    pp: &PublicParams,
    irpk: &Commitment,
    report_digest: &[u8; 32],
    cps: &[Commitment],
    point: &Scalar,
    values: &[Scalar],
    ops: &mut OpCounter,
) -> Scalar {
    let mut t = inner_context(irpk, report_digest);
    t.extend_from_slice(&scalar_to_bytes(point));
    t.extend_from_slice(&(cps.len() as u32).to_le_bytes());
    for (c, v) in cps.iter().zip(values) {
        t.extend_from_slice(&g1_to_bytes(&c.0));
        t.extend_from_slice(&scalar_to_bytes(v));
    }
    derive_rho(&pp.hash, &t, ops)
}

/// ρ and the batched instance `(Σ ρ^i·CP_i, z, Σ ρ^i·v_i, π_B)`. Used by the
/// inner prover, the outer prover's consistency check and the verifier.
#[allow(clippy::too_many_arguments)]
pub fn batch_openings(
    pp: &PublicParams,
    irpk: &Commitment,
    report_digest: &[u8; 32],
    cps: &[Commitment],
    point: &Scalar,
    values: &[Scalar],
    proof_b: &G1Affine,
    ops: &mut OpCounter,
) -> Result<(Scalar, OpeningInstance), ProtocolError> {
    if cps.is_empty() || cps.len() != values.len() {
        return Err(ProtocolError::Witness(format!("{} values for {} commitments", values.len(), cps.len())));
    }
    let rho = batch_rho(pp, irpk, report_digest, cps, point, values, ops);
    let points: Vec<G1Affine> = cps.iter().map(|c| c.0).collect();
    let instance = OpeningInstance {
        commitment: rho_combination(&points, &rho, ops),
        point: *point,
        value: values.iter().zip(rho_powers(&rho, values.len())).map(|(v, p)| *v * p).sum(),
        proof: *proof_b,
        degree_bound: pp.degree() as u32,
    };
    Ok((rho, instance))
}

/// `π_B` for a set of per-record openings.
pub fn batch_proof(
    pp: &PublicParams,
    irpk: &Commitment,
    report_digest: &[u8; 32],
    cps: &[Commitment],
    point: &Scalar,
    openings: &[(Scalar, G1Affine)],
    ops: &mut OpCounter,
) -> G1Affine {
    let values: Vec<Scalar> = openings.iter().map(|o| o.0).collect();
    let rho = batch_rho(pp, irpk, report_digest, cps, point, &values, ops);
    let pis: Vec<G1Affine> = openings.iter().map(|o| o.1).collect();
    rho_combination(&pis, &rho, ops)
}

/// Batches a full set of openings as the inner prover does.
pub fn batch_all(
    pp: &PublicParams,
    irpk: &Commitment,
    report_digest: &[u8; 32],
    cps: &[Commitment],
    point: &Scalar,
    openings: &[(Scalar, G1Affine)],
    ops: &mut OpCounter,
) -> Result<(Scalar, OpeningInstance), ProtocolError> {
    let proof_b = batch_proof(pp, irpk, report_digest, cps, point, openings, ops);
    let values: Vec<Scalar> = openings.iter().map(|o| o.0).collect();
    batch_openings(pp, irpk, report_digest, cps, point, &values, &proof_b, ops)
}

pub fn inner_prove(
    pp: &PublicParams,
    _pk: &ProvingKey,
    s_inp: &InnerStatement,
    j_in: &InnerWitness,
    ops: &mut OpCounter,
) -> Result<InnerProof, ProtocolError> {
    let ws = j_in.seq.checkpoints();
    if s_inp.cps.len() != ws.len() {
        return Err(ProtocolError::Witness(format!(
            "{} commitments for {} checkpoints",
            s_inp.cps.len(),
            ws.len()
        )));
    }
    let ids = predicate_ids(pp, &j_in.cfg);
    let mut polys = Vec::with_capacity(ws.len());
    for (i, (w, cp)) in ws.iter().zip(&s_inp.cps).enumerate() {
        let m = ir_message(pp, &j_in.irpk, w, &ids, s_inp.scale_bits)?;
        let r = cp_randomness(pp, &j_in.cr_kp, i);
        if !cs_open(&pp.commit, cp, &m, &r, ops) {
            return Err(ProtocolError::Witness(format!("CP_{i} does not open to checkpoint {i}")));
        }
        polys.push(ir_polynomial(pp, &m, &r));
    }

    let report = evaluate(&j_in.seq, &j_in.cfg)?;
    if !report.all_pass {
        return Err(ProtocolError::PredicateFailure(report.failures()));
    }
    let report_digest = report_digest(pp, &report);

    let point = common_point(pp, &j_in.irpk, &report_digest, &s_inp.cps, ops);
    let openings = polys
        .iter()
        .map(|p| pc_open(&pp.srs, p, &point, ops))
        .collect::<Result<Vec<_>, _>>()?;
    let (rho, batched) = batch_all(pp, &j_in.irpk, &report_digest, &s_inp.cps, &point, &openings, ops)?;
    Ok(InnerProof {
        point,
        openings,
        rho,
        batched,
        report,
        report_digest,
    })
}

impl OuterStatement {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.g1(&self.pcp.0).g1(&self.irpk.0).raw(&cps_bytes(&self.cps));
        e.finish()
    }

    fn decode(d: &mut Dec) -> Result<Self, ProtocolError> {
        let pcp = Commitment(d.g1()?);
        let irpk = Commitment(d.g1()?);
        let n = d.count(48)?;
        let cps = (0..n).map(|_| Ok(Commitment(d.g1()?))).collect::<Result<_, ProtocolError>>()?;
        Ok(Self { pcp, irpk, cps })
    }
}

/// What the attestation signs: the statement and the accumulator output.
pub fn attested_statement(s: &OuterStatement, accu: &AccumulatorValue, pi_acs: &AccumulatorProof) -> Vec<u8> {
    let mut b = s.to_bytes();
    b.extend(accu.to_bytes());
    b.extend(pi_acs.to_bytes());
    b
}

struct OuterBody {
    point: Scalar,
    report_digest: [u8; 32],
    values: Vec<Scalar>,
    proof_b: G1Affine,
}

impl OuterBody {
    fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.scalar(&self.point).raw(&self.report_digest).g1(&self.proof_b).u32(self.values.len() as u32);
        for v in &self.values {
            e.scalar(v);
        }
        e.finish()
    }

    fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(b);
        let point = d.scalar()?;
        let report_digest = d.array()?;
        let proof_b = d.g1()?;
        let n = d.count(32)?;
        let values = (0..n).map(|_| d.scalar()).collect::<Result<_, ProtocolError>>()?;
        d.finish()?;
        Ok(Self {
            point,
            report_digest,
            values,
            proof_b,
        })
    }
}

pub fn outer_prove(
    pp: &PublicParams,
    pk: &ProvingKey,
    _vk: &VerifyingKey,
    s_inp: &InnerStatement,
    j_out: &OuterWitness,
    pi_in: &InnerProof,
    ops: &mut OpCounter,
) -> Result<OuterOutput, ProtocolError> {
    let point = common_point(pp, &j_out.irpk, &pi_in.report_digest, &s_inp.cps, ops);
    if point != pi_in.point || pi_in.openings.len() != s_inp.cps.len() {
        return Err(ProtocolError::InnerMismatch("inner proof is not for this statement".into()));
    }
    let (rho, batched) = batch_all(
        pp,
        &j_out.irpk,
        &pi_in.report_digest,
        &s_inp.cps,
        &point,
        &pi_in.openings,
        ops,
    )?;
    if rho != pi_in.rho || batched != pi_in.batched {
        return Err(ProtocolError::InnerMismatch("batched instance does not match the openings".into()));
    }

    let pcp = cs_commit(&pp.commit, &[j_out.vk_in_digest], &j_out.cr_kp, ops)?;
    let keys = acs_keygen(&pp.srs, &pp.hash);
    let ctx = outer_context(&j_out.vk_in_digest, &pcp, &j_out.irpk);
    let q_in = [pi_in.batched];
    let (accu, pi_acs) = acs_prove(&keys.apk, &q_in, &ctx, None, ops)?;
    if !acs_verify(&keys.avk, &ctx, &q_in, None, &accu, &pi_acs, ops) {
        return Err(ProtocolError::Accumulation);
    }

    let statement = OuterStatement {
        pcp,
        irpk: j_out.irpk,
        cps: s_inp.cps.clone(),
    };
    let body = OuterBody {
        point,
        report_digest: pi_in.report_digest,
        values: pi_in.openings.iter().map(|o| o.0).collect(),
        proof_b: batched.proof,
    };
    let pi_out = TranscriptAttestation::prove(
        &pk.pk_r.key,
        &attested_statement(&statement, &accu, &pi_acs),
        body.to_bytes(),
    );
    Ok(OuterOutput {
        statement,
        pi_out,
        accu,
        pi_acs,
    })
}

/// `b = backend-verify ∧ decide`. Malformed proof bodies are errors; every
/// well-formed but invalid input yields `Ok(false)`.
pub fn verify(
    pp: &PublicParams,
    vk: &VerifyingKey,
    s_outp: &OuterStatement,
    pi_out: &AttestedProof,
    accu: &AccumulatorValue,
    pi_acs: &AccumulatorProof,
    ops: &mut OpCounter,
) -> Result<bool, ProtocolError> {
    if !TranscriptAttestation::verify(&vk.vk_r.key, &attested_statement(s_outp, accu, pi_acs), pi_out) {
        return Ok(false);
    }
    let body = OuterBody::from_bytes(&pi_out.body)?;
    if body.values.len() != s_outp.cps.len() || s_outp.cps.is_empty() {
        return Ok(false);
    }
    let point = common_point(pp, &s_outp.irpk, &body.report_digest, &s_outp.cps, ops);
    if point != body.point {
        return Ok(false);
    }
    let (_, batched) = batch_openings(
        pp,
        &s_outp.irpk,
        &body.report_digest,
        &s_outp.cps,
        &point,
        &body.values,
        &body.proof_b,
        ops,
    )?;
    let keys = acs_keygen(&pp.srs, &pp.hash);
    let ctx = outer_context(&vk.vk_in_digest(pp), &s_outp.pcp, &s_outp.irpk);
    if !acs_verify(&keys.avk, &ctx, &[batched], None, accu, pi_acs, ops) {
        return Ok(false);
    }
    Ok(acs_decide(&keys.dk, accu, ops))
}

impl InnerProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.scalar(&self.point).scalar(&self.rho).raw(&self.batched.to_bytes());
        e.str(&self.report.to_text()).raw(&self.report_digest);
        e.u32(self.openings.len() as u32);
        for (v, pi) in &self.openings {
            e.scalar(v).g1(pi);
        }
        section(TAG_INNERPRF, &e.finish())
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(b, TAG_INNERPRF)?);
        let point = d.scalar()?;
        let rho = d.scalar()?;
        let batched = OpeningInstance::from_bytes(d.raw(OpeningInstance::ENCODED_LEN)?)?;
        let report = PredicateReport::from_text(&d.str()?)?;
        let report_digest = d.array()?;
        let n = d.count(80)?;
        let openings = (0..n).map(|_| Ok((d.scalar()?, d.g1()?))).collect::<Result<_, ProtocolError>>()?;
        d.finish()?;
        Ok(Self {
            point,
            openings,
            rho,
            batched,
            report,
            report_digest,
        })
    }
}

impl OuterOutput {
    pub(crate) fn encode(&self, e: &mut Enc) {
        e.bytes(&self.statement.to_bytes())
            .bytes(&self.pi_out.to_bytes())
            .raw(&self.accu.to_bytes())
            .raw(&self.pi_acs.to_bytes());
    }

    pub(crate) fn decode(d: &mut Dec) -> Result<Self, ProtocolError> {
        let mut sd = Dec::new(d.bytes()?);
        let statement = OuterStatement::decode(&mut sd)?;
        sd.finish()?;
        let pi_out = AttestedProof::from_bytes(d.bytes()?)?;
        let accu = AccumulatorValue::from_bytes(d.raw(AccumulatorValue::ENCODED_LEN)?)?;
        let pi_acs = AccumulatorProof::from_bytes(d.raw(AccumulatorProof::ENCODED_LEN)?)?;
        Ok(Self {
            statement,
            pi_out,
            accu,
            pi_acs,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        self.encode(&mut e);
        section(TAG_OUTERPRF, &e.finish())
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(b, TAG_OUTERPRF)?);
        let out = Self::decode(&mut d)?;
        d.finish()?;
        Ok(out)
    }
}
