//! Accumulation of KZG opening checks.
//!
//! Each step batches its instances with a transcript challenge ρ and folds the
//! two G1 operands of the batched check into a running accumulator
//! `(lhs, rhs)` with a second challenge ρ̂. Only the decider pairs:
//! `e(lhs, G2) = e(rhs, τ·G2)`.

use crate::curve::{g1_from_bytes, g1_to_bytes, scalar_from_bytes, scalar_to_bytes, G1Affine, G2Affine, Scalar, G1};
use crate::hash::{crh_bytes, digest_bytes, tag, HashParams, Tag};
use crate::kzg::{check_operands, pairing_check, Srs};
use crate::ops::OpCounter;
use crate::CryptoError;
use ark_ec::{AffineRepr, CurveGroup, VariableBaseMSM};
use ark_ff::{One, Zero};

pub const TAG_RHO: Tag = tag("acs-rho");
pub const TAG_RHO_HAT: Tag = tag("acs-fold");
pub const TAG_TRANSCRIPT: Tag = tag("acs-trans");

/// `(C, z, v, π)` plus the degree bound the prover claims for the polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpeningInstance {
    pub commitment: G1Affine,
    pub point: Scalar,
    pub value: Scalar,
    pub proof: G1Affine,
    pub degree_bound: u32,
}

impl OpeningInstance {
    pub const ENCODED_LEN: usize = 48 + 32 + 32 + 48 + 4;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ENCODED_LEN);
        out.extend_from_slice(&g1_to_bytes(&self.commitment));
        out.extend_from_slice(&scalar_to_bytes(&self.point));
        out.extend_from_slice(&scalar_to_bytes(&self.value));
        out.extend_from_slice(&g1_to_bytes(&self.proof));
        out.extend_from_slice(&self.degree_bound.to_le_bytes());
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        if b.len() != Self::ENCODED_LEN {
            return Err(CryptoError::Encoding(format!(
                "opening instance needs {} bytes, got {}",
                Self::ENCODED_LEN,
                b.len()
            )));
        }
        Ok(Self {
            commitment: g1_from_bytes(&b[..48])?,
            point: scalar_from_bytes(&b[48..80])?,
            value: scalar_from_bytes(&b[80..112])?,
            proof: g1_from_bytes(&b[112..160])?,
            degree_bound: u32::from_le_bytes(b[160..164].try_into().unwrap()),
        })
    }
}

/// `ACCU`: two G1 points whatever the number of folded instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccumulatorValue {
    pub lhs: G1Affine,
    pub rhs: G1Affine,
}

impl AccumulatorValue {
    pub const ENCODED_LEN: usize = 2 * 48;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ENCODED_LEN);
        out.extend_from_slice(&g1_to_bytes(&self.lhs));
        out.extend_from_slice(&g1_to_bytes(&self.rhs));
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        if b.len() != Self::ENCODED_LEN {
            return Err(CryptoError::Encoding(format!("accumulator needs 96 bytes, got {}", b.len())));
        }
        Ok(Self {
            lhs: g1_from_bytes(&b[..48])?,
            rhs: g1_from_bytes(&b[48..])?,
        })
    }
}

/// `π_ACS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccumulatorProof {
    pub rho: Scalar,
    pub rho_hat: Scalar,
    pub transcript_digest: [u8; 32],
}

impl AccumulatorProof {
    pub const ENCODED_LEN: usize = 32 * 3;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ENCODED_LEN);
        out.extend_from_slice(&scalar_to_bytes(&self.rho));
        out.extend_from_slice(&scalar_to_bytes(&self.rho_hat));
        out.extend_from_slice(&self.transcript_digest);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        if b.len() != Self::ENCODED_LEN {
            return Err(CryptoError::Encoding(format!("ACS proof needs 96 bytes, got {}", b.len())));
        }
        Ok(Self {
            rho: scalar_from_bytes(&b[..32])?,
            rho_hat: scalar_from_bytes(&b[32..64])?,
            transcript_digest: b[64..].try_into().unwrap(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcsProverKey {
    pub g1: G1Affine,
    pub max_degree: usize,
    pub hash: HashParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcsVerifierKey {
    pub g1: G1Affine,
    pub max_degree: usize,
    pub hash: HashParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcsDeciderKey {
    pub g2: G2Affine,
    pub tau_g2: G2Affine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcsKeys {
    pub apk: AcsProverKey,
    pub avk: AcsVerifierKey,
    pub dk: AcsDeciderKey,
}

pub fn acs_keygen(srs: &Srs, hash: &HashParams) -> AcsKeys {
    AcsKeys {
        apk: AcsProverKey {
            g1: srs.g1(),
            max_degree: srs.max_degree(),
            hash: hash.clone(),
        },
        avk: AcsVerifierKey {
            g1: srs.g1(),
            max_degree: srs.max_degree(),
            hash: hash.clone(),
        },
        dk: AcsDeciderKey {
            g2: srs.g2(),
            tau_g2: srs.tau_g2(),
        },
    }
}

/// Non-zero challenge from a tagged transcript; a zero output is resampled
/// with an appended counter.
pub fn derive_challenge(pp: &HashParams, t: &Tag, transcript: &[u8], ops: &mut OpCounter) -> Scalar {
    let mut buf = transcript.to_vec();
    let base = buf.len();
    for ctr in 0u32.. {
        buf.truncate(base);
        if ctr > 0 {
            buf.extend_from_slice(&ctr.to_le_bytes());
        }
        ops.hashes += 1;
        let c = crh_bytes(pp, t, &buf);
        if !c.is_zero() {
            return c;
        }
    }
    unreachable!()
}

pub fn derive_rho(pp: &HashParams, transcript: &[u8], ops: &mut OpCounter) -> Scalar {
    derive_challenge(pp, &TAG_RHO, transcript, ops)
}

/// The batching challenge `acs_prove` uses for these inputs.
pub fn acs_rho(
    pp: &HashParams,
    vk_in: &[u8],
    q_in: &[OpeningInstance],
    accu_in: Option<&AccumulatorValue>,
    ops: &mut OpCounter,
) -> Scalar {
    derive_rho(pp, &acs_transcript(vk_in, q_in, accu_in), ops)
}

/// `1, ρ, ρ², …` of length `n`.
pub fn rho_powers(rho: &Scalar, n: usize) -> Vec<Scalar> {
    let mut powers = Vec::with_capacity(n);
    let mut p = Scalar::one();
    for _ in 0..n {
        powers.push(p);
        p *= rho;
    }
    powers
}

/// `Σ ρ^i·P_i`.
pub fn rho_combination(points: &[G1Affine], rho: &Scalar, ops: &mut OpCounter) -> G1Affine {
    ops.g1_muls += points.len();
    G1::msm(points, &rho_powers(rho, points.len())).unwrap().into_affine()
}

/// `(Σ ρ^i·C_i, Σ ρ^i·v_i, Σ ρ^i·π_i)` at the shared point.
pub fn batch(instances: &[OpeningInstance], rho: &Scalar, ops: &mut OpCounter) -> Result<OpeningInstance, CryptoError> {
    let first = instances.first().ok_or(CryptoError::Empty("batch needs at least one instance"))?;
    if instances.iter().any(|q| q.point != first.point) {
        return Err(CryptoError::PointMismatch);
    }
    let powers = rho_powers(rho, instances.len());
    let cs: Vec<G1Affine> = instances.iter().map(|q| q.commitment).collect();
    let pis: Vec<G1Affine> = instances.iter().map(|q| q.proof).collect();
    Ok(OpeningInstance {
        commitment: rho_combination(&cs, rho, ops),
        point: first.point,
        value: instances.iter().zip(&powers).map(|(q, p)| q.value * p).sum(),
        proof: rho_combination(&pis, rho, ops),
        degree_bound: instances.iter().map(|q| q.degree_bound).max().unwrap(),
    })
}

/// Ordered encoding of everything the challenges must bind.
pub fn acs_transcript(vk_in: &[u8], q_in: &[OpeningInstance], accu_in: Option<&AccumulatorValue>) -> Vec<u8> {
    let mut t = Vec::with_capacity(16 + vk_in.len() + q_in.len() * OpeningInstance::ENCODED_LEN + 97);
    t.extend_from_slice(&(vk_in.len() as u64).to_le_bytes());
    t.extend_from_slice(vk_in);
    t.extend_from_slice(&(q_in.len() as u64).to_le_bytes());
    for q in q_in {
        t.extend_from_slice(&q.to_bytes());
    }
    match accu_in {
        None => t.push(0),
        Some(a) => {
            t.push(1);
            t.extend_from_slice(&a.to_bytes());
        }
    }
    t
}

struct Step {
    accu: AccumulatorValue,
    proof: AccumulatorProof,
}

fn fold(
    g1: &G1Affine,
    hash: &HashParams,
    max_degree: usize,
    q_in: &[OpeningInstance],
    vk_in: &[u8],
    accu_in: Option<&AccumulatorValue>,
    ops: &mut OpCounter,
) -> Result<Step, CryptoError> {
    if let Some(q) = q_in.iter().find(|q| q.degree_bound as usize > max_degree) {
        return Err(CryptoError::Degree {
            degree: q.degree_bound as usize,
            max: max_degree,
        });
    }
    let t = acs_transcript(vk_in, q_in, accu_in);
    ops.hashes += 1;
    let transcript_digest = digest_bytes(&crh_bytes(hash, &TAG_TRANSCRIPT, &t));
    let rho = derive_rho(hash, &t, ops);
    let b = batch(q_in, &rho, ops)?;
    ops.g1_muls += 2;
    let lhs = check_operands(g1, &b.commitment, &b.point, &b.value, &b.proof);
    let rhs = G1::from(b.proof);
    let (accu, rho_hat) = match accu_in {
        None => ((lhs, rhs), Scalar::one()),
        Some(a) => {
            let mut t2 = t;
            t2.extend_from_slice(&b.to_bytes());
            let rho_hat = derive_challenge(hash, &TAG_RHO_HAT, &t2, ops);
            ops.g1_muls += 2;
            ops.g1_adds += 2;
            ((a.lhs + lhs * rho_hat, a.rhs + rhs * rho_hat), rho_hat)
        }
    };
    let pts = G1::normalize_batch(&[accu.0, accu.1]);
    Ok(Step {
        accu: AccumulatorValue {
            lhs: pts[0],
            rhs: pts[1],
        },
        proof: AccumulatorProof {
            rho,
            rho_hat,
            transcript_digest,
        },
    })
}

/// Folds `q_in` (all at one point) into `accu_in`, or starts a fresh
/// accumulator when `accu_in` is `None`.
pub fn acs_prove(
    apk: &AcsProverKey,
    q_in: &[OpeningInstance],
    vk_in: &[u8],
    accu_in: Option<&AccumulatorValue>,
    ops: &mut OpCounter,
) -> Result<(AccumulatorValue, AccumulatorProof), CryptoError> {
    let s = fold(&apk.g1, &apk.hash, apk.max_degree, q_in, vk_in, accu_in, ops)?;
    Ok((s.accu, s.proof))
}

/// Recomputes the fold with group operations only.
pub fn acs_verify(
    avk: &AcsVerifierKey,
    vk_in: &[u8],
    q_in: &[OpeningInstance],
    accu_in: Option<&AccumulatorValue>,
    accu_out: &AccumulatorValue,
    proof: &AccumulatorProof,
    ops: &mut OpCounter,
) -> bool {
    match fold(&avk.g1, &avk.hash, avk.max_degree, q_in, vk_in, accu_in, ops) {
        Ok(s) => s.accu == *accu_out && s.proof == *proof,
        Err(_) => false,
    }
}

/// One pairing-product check on the accumulator.
pub fn acs_decide(dk: &AcsDeciderKey, accu: &AccumulatorValue, ops: &mut OpCounter) -> bool {
    pairing_check(&dk.g2, &dk.tau_g2, accu.lhs.into_group(), accu.rhs.into_group(), ops)
}
