//! The full owner-side flow from a checkpoint sequence to an outer proof.

use crate::keys::{AddressKeys, ProofKeys};
use crate::params::PublicParams;
use crate::prove::{inner_prove, outer_prove, InnerProof, InnerStatement, InnerWitness, OuterOutput, OuterWitness};
use crate::record::{ir_gen, IdentityRecord};
use crate::ProtocolError;
use didm_core::predicate::PredicateConfig;
use didm_core::CheckpointSequence;
use didm_crypto::OpCounter;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct AuditRun {
    pub records: Vec<IdentityRecord>,
    pub statement: InnerStatement,
    pub inner: InnerProof,
    pub outer: OuterOutput,
    pub inner_ops: OpCounter,
    pub outer_ops: OpCounter,
    pub inner_time: Duration,
    pub outer_time: Duration,
}

/// `ir_gen → inner_prove → outer_prove`.
pub fn audit(
    pp: &PublicParams,
    keys: &ProofKeys,
    addr: &AddressKeys,
    seq: &CheckpointSequence,
    cfg: &PredicateConfig,
    scale_bits: u32,
) -> Result<AuditRun, ProtocolError> {
    let (records, cps) = ir_gen(pp, &addr.irpk, seq, cfg, &addr.cr_kp, scale_bits)?;
    let statement = InnerStatement { cps, scale_bits };
    let witness = InnerWitness {
        irpk: addr.irpk,
        seq: seq.clone(),
        cfg: cfg.clone(),
        cr_kp: addr.cr_kp,
    };
    let mut inner_ops = OpCounter::new();
    let t0 = Instant::now();
    let inner = inner_prove(pp, &keys.pk, &statement, &witness, &mut inner_ops)?;
    let inner_time = t0.elapsed();
    let j_out = OuterWitness {
        vk_in_digest: keys.vk.vk_in_digest(pp),
        cr_kp: addr.cr_kp,
        irpk: addr.irpk,
    };
    let mut outer_ops = OpCounter::new();
    let t1 = Instant::now();
    let outer = outer_prove(pp, &keys.pk, &keys.vk, &statement, &j_out, &inner, &mut outer_ops)?;
    let outer_time = t1.elapsed();
    Ok(AuditRun {
        records,
        statement,
        inner,
        outer,
        inner_ops,
        outer_ops,
        inner_time,
        outer_time,
    })
}
