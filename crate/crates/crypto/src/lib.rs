//! Cryptographic building blocks over BLS12-377.

pub mod acs;
pub mod commit;
pub mod curve;
pub mod hash;
pub mod kzg;
pub mod merkle;
pub mod ops;

pub use acs::{
    acs_decide, acs_keygen, acs_prove, acs_rho, acs_transcript, acs_verify, batch, derive_challenge, derive_rho, rho_combination, rho_powers, AccumulatorProof,
    AccumulatorValue, AcsDeciderKey, AcsKeys, AcsProverKey, AcsVerifierKey, OpeningInstance,
};
pub use commit::{cs_commit, cs_open, CommitParams, Commitment, DEFAULT_COMMIT_SEED};
pub use curve::{Scalar, CURVE_ID, G1, G1Affine, G2, G2Affine};
pub use hash::{crh_bytes, crh_val, digest_bytes, tag, HashParams, HashVariant, Tag};
pub use kzg::{pc_check, pc_commit, pc_open, pc_setup, poly_eval, Srs};
pub use merkle::{merkle_prove, merkle_root, merkle_verify, MerklePath, MerkleTree};
pub use ops::OpCounter;

#[derive(Debug, thiserror::Error)]
pub enum CryptoError {
    #[error("encoding: {0}")]
    Encoding(String),
    #[error("message of {len} scalars exceeds commitment capacity {capacity}")]
    MessageTooLong { len: usize, capacity: usize },
    #[error("degree {degree} exceeds supported maximum {max}")]
    Degree { degree: usize, max: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("index {index} out of range for {len} leaves")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("opening instances are not at a common point")]
    PointMismatch,
}
