//! Append-only ledger with a single sequencer.
//!
//! Journal `ledger.a2d`: repeated `u32 len | transaction bytes | sha256`.
//! State (blocks, Merkle leaves, nonce and commitment sets) is rebuilt on
//! load by re-verifying every record in order.

use crate::codec::{expect_section, section, Dec, Enc, TAG_TRANSACT};
use crate::keys::VerifyingKey;
use crate::params::PublicParams;
use crate::prove::{verify, OuterOutput, OuterStatement};
use crate::ProtocolError;
use didm_crypto::curve::g1_to_bytes;
use didm_crypto::{
    crh_bytes, merkle_root, tag, AccumulatorProof, AccumulatorValue, Commitment, OpCounter, Scalar, Tag,
};
use crate::nizk::AttestedProof;
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const TAG_CP_LEAF: Tag = tag("cp-leaf");
const NONCE_DOMAIN: &[u8] = b"A2DIDM/tx-nonce\0";

#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    /// Merkle root over all prior CP leaves followed by this transaction's.
    pub ledger_digest: Scalar,
    pub cp_list: Vec<Commitment>,
    pub pcp: Commitment,
    pub pi_out: AttestedProof,
    pub accu: AccumulatorValue,
    pub pi_acs: AccumulatorProof,
    pub submitter: Commitment,
    pub nonce: [u8; 32],
}

pub fn cp_leaf(pp: &PublicParams, cp: &Commitment) -> Scalar {
    crh_bytes(&pp.hash, &TAG_CP_LEAF, &g1_to_bytes(&cp.0))
}

fn ledger_digest(pp: &PublicParams, prior_leaves: &[Scalar], cps: &[Commitment]) -> Result<Scalar, ProtocolError> {
    let mut leaves = prior_leaves.to_vec();
    leaves.extend(cps.iter().map(|c| cp_leaf(pp, c)));
    Ok(merkle_root(&pp.hash, &leaves)?)
}

impl Transaction {
    pub fn statement(&self) -> OuterStatement {
        OuterStatement {
            pcp: self.pcp,
            irpk: self.submitter,
            cps: self.cp_list.clone(),
        }
    }

    fn outer(&self) -> OuterOutput {
        OuterOutput {
            statement: self.statement(),
            pi_out: self.pi_out.clone(),
            accu: self.accu,
            pi_acs: self.pi_acs,
        }
    }

    fn content_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.scalar(&self.ledger_digest);
        self.outer().encode(&mut e);
        e.finish()
    }

    pub fn compute_nonce(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(NONCE_DOMAIN);
        h.update(self.content_bytes());
        h.finalize().into()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = self.content_bytes();
        b.extend_from_slice(&self.nonce);
        section(TAG_TRANSACT, &b)
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(b, TAG_TRANSACT)?);
        let ledger_digest = d.scalar()?;
        let o = OuterOutput::decode(&mut d)?;
        let nonce = d.array()?;
        d.finish()?;
        Ok(Self {
            ledger_digest,
            cp_list: o.statement.cps,
            pcp: o.statement.pcp,
            pi_out: o.pi_out,
            accu: o.accu,
            pi_acs: o.pi_acs,
            submitter: o.statement.irpk,
            nonce,
        })
    }
}

/// Assembles a transaction, refusing if the proof does not verify locally.
pub fn build_transaction(
    pp: &PublicParams,
    vk: &VerifyingKey,
    outer: &OuterOutput,
    prior_leaves: &[Scalar],
) -> Result<Transaction, ProtocolError> {
    let mut tx = Transaction {
        ledger_digest: ledger_digest(pp, prior_leaves, &outer.statement.cps)?,
        cp_list: outer.statement.cps.clone(),
        pcp: outer.statement.pcp,
        pi_out: outer.pi_out.clone(),
        accu: outer.accu,
        pi_acs: outer.pi_acs,
        submitter: outer.statement.irpk,
        nonce: [0; 32],
    };
    tx.nonce = tx.compute_nonce();
    if !verify_tx(pp, vk, &tx, prior_leaves, &mut OpCounter::new())? {
        return Err(ProtocolError::InvalidTransaction("proof does not verify locally".into()));
    }
    Ok(tx)
}

/// Digest consistency, nonce integrity and protocol verification.
pub fn verify_tx(
    pp: &PublicParams,
    vk: &VerifyingKey,
    tx: &Transaction,
    prior_leaves: &[Scalar],
    ops: &mut OpCounter,
) -> Result<bool, ProtocolError> {
    if tx.cp_list.is_empty() {
        return Ok(false);
    }
    if tx.nonce != tx.compute_nonce() {
        return Ok(false);
    }
    if ledger_digest(pp, prior_leaves, &tx.cp_list)? != tx.ledger_digest {
        return Ok(false);
    }
    verify(pp, vk, &tx.statement(), &tx.pi_out, &tx.accu, &tx.pi_acs, ops)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub height: u64,
    pub timestamp: u64,
    pub tx_digest: [u8; 32],
    pub tx: Transaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Receipt {
    /// Height of the new block when accepted.
    pub height: Option<u64>,
    pub timestamp: u64,
    pub tx_digest: [u8; 32],
    pub accepted: bool,
    pub replay: bool,
    pub reason: Option<String>,
    pub ops: OpCounter,
    pub verify_time: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LedgerStats {
    pub blocks: u64,
    pub leaves: u64,
    pub submissions: u64,
    pub rejections: u64,
    pub replays: u64,
    pub ops: OpCounter,
    pub verify_time: Duration,
}

pub fn tx_digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

pub struct Ledger {
    pp: PublicParams,
    vk: VerifyingKey,
    blocks: Vec<Block>,
    leaves: Vec<Scalar>,
    nonces: HashSet<[u8; 32]>,
    claimed: HashSet<[u8; 48]>,
    journal: Option<PathBuf>,
    stats: LedgerStats,
}

impl Ledger {
    pub fn in_memory(pp: PublicParams, vk: VerifyingKey) -> Self {
        Self {
            pp,
            vk,
            blocks: Vec::new(),
            leaves: Vec::new(),
            nonces: HashSet::new(),
            claimed: HashSet::new(),
            journal: None,
            stats: LedgerStats::default(),
        }
    }

    /// Opens (or creates) a journal and replays it.
    pub fn open(pp: PublicParams, vk: VerifyingKey, path: &Path) -> Result<Self, ProtocolError> {
        let mut ledger = Self::in_memory(pp, vk);
        let mut bytes = Vec::new();
        match File::open(path) {
            Ok(mut f) => {
                f.read_to_end(&mut bytes)?;
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        let mut d = Dec::new(&bytes);
        while d.remaining() > 0 {
            let tx_bytes = d.bytes()?;
            let digest: [u8; 32] = d.array()?;
            if tx_digest(tx_bytes) != digest {
                return Err(ProtocolError::Ledger(format!(
                    "journal record {} fails its digest",
                    ledger.blocks.len() + 1
                )));
            }
            let tx = Transaction::from_bytes(tx_bytes)?;
            let r = ledger.submit(tx)?;
            if !r.accepted {
                return Err(ProtocolError::Ledger(format!(
                    "journal record {} no longer verifies: {}",
                    ledger.blocks.len() + 1,
                    r.reason.unwrap_or_default()
                )));
            }
        }
        ledger.journal = Some(path.to_path_buf());
        Ok(ledger)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn leaves(&self) -> &[Scalar] {
        &self.leaves
    }

    pub fn height(&self) -> u64 {
        self.blocks.len() as u64
    }

    pub fn stats(&self) -> LedgerStats {
        self.stats
    }

    pub fn submit(&mut self, tx: Transaction) -> Result<Receipt, ProtocolError> {
        let bytes = tx.to_bytes();
        let digest = tx_digest(&bytes);
        self.stats.submissions += 1;
        let mut receipt = Receipt {
            height: None,
            timestamp: self.height(),
            tx_digest: digest,
            accepted: false,
            replay: false,
            reason: None,
            ops: OpCounter::new(),
            verify_time: Duration::ZERO,
        };
        let reject = |mut r: Receipt, why: &str, stats: &mut LedgerStats| {
            stats.rejections += 1;
            r.reason = Some(why.to_string());
            Ok(r)
        };
        if self.nonces.contains(&tx.nonce) {
            self.stats.replays += 1;
            receipt.replay = true;
            return reject(receipt, "replayed transaction", &mut self.stats);
        }
        if tx.cp_list.iter().any(|c| self.claimed.contains(&g1_to_bytes(&c.0))) {
            return reject(receipt, "record commitment already claimed", &mut self.stats);
        }
        let t0 = Instant::now();
        let ok = verify_tx(&self.pp, &self.vk, &tx, &self.leaves, &mut receipt.ops)?;
        receipt.verify_time = t0.elapsed();
        self.stats.ops.absorb(&receipt.ops);
        self.stats.verify_time += receipt.verify_time;
        if !ok {
            return reject(receipt, "verification failed", &mut self.stats);
        }

        if let Some(path) = &self.journal {
            let mut rec = Enc::new();
            rec.bytes(&bytes).raw(&digest);
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            f.write_all(&rec.finish())?;
            f.sync_data()?;
        }
        let height = self.height() + 1;
        self.leaves.extend(tx.cp_list.iter().map(|c| cp_leaf(&self.pp, c)));
        self.claimed.extend(tx.cp_list.iter().map(|c| g1_to_bytes(&c.0)));
        self.nonces.insert(tx.nonce);
        self.blocks.push(Block {
            height,
            timestamp: height,
            tx_digest: digest,
            tx,
        });
        self.stats.blocks = height;
        self.stats.leaves = self.leaves.len() as u64;
        receipt.height = Some(height);
        receipt.timestamp = height;
        receipt.accepted = true;
        Ok(receipt)
    }

    /// Re-verifies the block at `height` against the leaves before it.
    pub fn verify_block(&self, height: u64, ops: &mut OpCounter) -> Result<bool, ProtocolError> {
        let idx = height
            .checked_sub(1)
            .filter(|&i| (i as usize) < self.blocks.len())
            .ok_or_else(|| ProtocolError::Ledger(format!("no block at height {height}")))? as usize;
        let prior: usize = self.blocks[..idx].iter().map(|b| b.tx.cp_list.len()).sum();
        verify_tx(&self.pp, &self.vk, &self.blocks[idx].tx, &self.leaves[..prior], ops)
    }
}
