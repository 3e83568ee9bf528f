//! Pedersen vector commitment `Σ m_j·G_j + r·H` over G1.

use crate::curve::{hash_to_g1, G1Affine, Scalar, G1};
use crate::ops::OpCounter;
use crate::CryptoError;
use ark_ec::{CurveGroup, VariableBaseMSM};

pub const DEFAULT_COMMIT_SEED: &str = "A2DIDM vector commitment v1";

/// `pp_C`: message generators plus the blinding generator, all hashed to the
/// curve from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitParams {
    seed: String,
    gens: Vec<G1Affine>,
    blind: G1Affine,
}

impl CommitParams {
    pub fn new(seed: &str, capacity: usize) -> Self {
        let gens = (0..capacity as u64).map(|i| hash_to_g1(seed.as_bytes(), i)).collect();
        // The blinding generator sits at the last index so growing the
        // capacity never changes it.
        let blind = hash_to_g1(seed.as_bytes(), u64::MAX);
        Self {
            seed: seed.to_string(),
            gens,
            blind,
        }
    }

    /// Uses caller-supplied generators, e.g. the G1 powers of a KZG reference
    /// string so that commitments double as polynomial commitments.
    pub fn from_generators(seed: &str, gens: Vec<G1Affine>, blind: G1Affine) -> Self {
        Self {
            seed: seed.to_string(),
            gens,
            blind,
        }
    }

    pub fn seed(&self) -> &str {
        &self.seed
    }

    pub fn capacity(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[G1Affine] {
        &self.gens
    }

    pub fn blinding_generator(&self) -> G1Affine {
        self.blind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Commitment(pub G1Affine);

pub fn cs_commit(
    pp: &CommitParams,
    msg: &[Scalar],
    r: &Scalar,
    ops: &mut OpCounter,
) -> Result<Commitment, CryptoError> {
    if msg.len() > pp.gens.len() {
        return Err(CryptoError::MessageTooLong {
            len: msg.len(),
            capacity: pp.gens.len(),
        });
    }
    let mut bases = pp.gens[..msg.len()].to_vec();
    bases.push(pp.blind);
    let mut scalars = msg.to_vec();
    scalars.push(*r);
    ops.g1_muls += scalars.len();
    Ok(Commitment(G1::msm(&bases, &scalars).unwrap().into_affine()))
}

pub fn cs_open(pp: &CommitParams, com: &Commitment, msg: &[Scalar], r: &Scalar, ops: &mut OpCounter) -> bool {
    matches!(cs_commit(pp, msg, r, ops), Ok(c) if c == *com)
}
