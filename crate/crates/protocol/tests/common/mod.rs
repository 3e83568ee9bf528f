#![allow(dead_code)]

use didm_core::forge::toy_run;
use didm_core::predicate::PredicateConfig;
use didm_core::{CheckpointSequence, DEFAULT_SCALE_BITS};
use didm_protocol::{addr_gen, audit, didm_gen, key_gen, AddressKeys, AuditRun, ProofKeys, PublicParams};

pub struct Fixture {
    pub pp: PublicParams,
    pub keys: ProofKeys,
    pub addr: AddressKeys,
    pub seq: CheckpointSequence,
    pub cfg: PredicateConfig,
}

impl Fixture {
    pub fn new(seed: u64, epochs: usize) -> Self {
        let (_, seq) = toy_run(seed, epochs).unwrap();
        let pp = didm_gen(128, 7, seq.arch().total_params()).unwrap();
        let keys = key_gen(&pp);
        let addr = addr_gen(&pp, seed).unwrap();
        Self {
            pp,
            keys,
            addr,
            seq,
            cfg: PredicateConfig::default(),
        }
    }

    pub fn with_owner(&self, owner: u64) -> Self {
        Self {
            pp: self.pp.clone(),
            keys: self.keys.clone(),
            addr: addr_gen(&self.pp, owner).unwrap(),
            seq: self.seq.clone(),
            cfg: self.cfg.clone(),
        }
    }

    pub fn audit(&self) -> AuditRun {
        audit(&self.pp, &self.keys, &self.addr, &self.seq, &self.cfg, DEFAULT_SCALE_BITS).unwrap()
    }
}
