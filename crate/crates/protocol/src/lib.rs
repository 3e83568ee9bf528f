//! Identity-record generation, the two-layer audit proof with accumulated
//! opening checks, and a simulated ledger.

pub mod codec;
pub mod keys;
pub mod ledger;
pub mod nizk;
pub mod params;
pub mod pipeline;
pub mod prove;
pub mod record;

pub use keys::{addr_gen, key_gen, AddressKeys, ProofKeys, ProvingKey, VerifyingKey};
pub use ledger::{build_transaction, verify_tx, Block, Ledger, LedgerStats, Receipt, Transaction};
pub use nizk::{AttestedProof, NizkBackend, TranscriptAttestation};
pub use params::{didm_gen, didm_gen_with, PublicParams, SECURITY_LEVEL};
pub use pipeline::{audit, AuditRun};
pub use prove::{
    attested_statement, batch_all, batch_openings, batch_proof, batch_rho, inner_prove, outer_prove, verify, InnerProof, InnerStatement, InnerWitness, OuterOutput, OuterStatement,
    OuterWitness,
};
pub use record::{ir_gen, IdentityRecord, IrAux};

use didm_core::predicate::{PredicateError, PredicateKind};
use didm_core::{CheckpointError, QuantizeError};
use didm_crypto::CryptoError;
use thiserror::Error;

fn names(kinds: &[PredicateKind]) -> String {
    kinds.iter().map(|k| format!("Φ_{k}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("predicate check failed: {}", names(.0))]
    PredicateFailure(Vec<PredicateKind>),
    #[error("witness does not match the statement: {0}")]
    Witness(String),
    #[error("inner proof mismatch: {0}")]
    InnerMismatch(String),
    #[error("accumulation step did not verify")]
    Accumulation,
    #[error("refusing to build transaction: {0}")]
    InvalidTransaction(String),
    #[error("parameters: {0}")]
    Params(String),
    #[error("malformed encoding: {0}")]
    Encoding(String),
    #[error("ledger: {0}")]
    Ledger(String),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
