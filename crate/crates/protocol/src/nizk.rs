//! Pluggable backend for the outer proof.
//!
//! [`TranscriptAttestation`] is the only shipped backend: the proof is a
//! domain-separated SHA-256 over the relation key, the statement and a proof
//! body. It binds but does not hide or compress; the relation check itself
//! is re-executed by the protocol verifier from the body.

use crate::codec::{Dec, Enc};
use crate::ProtocolError;
use sha2::{Digest, Sha256};

/// Mirrors `NIZK.{Gen, KeyGen, Prove, Verify}`.
pub trait NizkBackend {
    type Params;
    type ProvingKey;
    type VerifyingKey;
    type Proof;

    fn gen(seed: &str, relation: &str) -> Self::Params;
    fn key_gen(pp: &Self::Params) -> (Self::ProvingKey, Self::VerifyingKey);
    fn prove(pk: &Self::ProvingKey, statement: &[u8], body: Vec<u8>) -> Self::Proof;
    fn verify(vk: &Self::VerifyingKey, statement: &[u8], proof: &Self::Proof) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NizkParams {
    pub seed: String,
    pub relation: String,
}

impl NizkParams {
    pub fn encode(&self, e: &mut Enc) {
        e.str(&self.seed).str(&self.relation);
    }

    pub fn decode(d: &mut Dec) -> Result<Self, ProtocolError> {
        Ok(Self {
            seed: d.str()?,
            relation: d.str()?,
        })
    }
}

/// Proving and verifying keys coincide for the attestation backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttestationKey(pub [u8; 32]);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttestedProof {
    pub body: Vec<u8>,
    pub tag: [u8; 32],
}

impl AttestedProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.bytes(&self.body).raw(&self.tag);
        e.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(b);
        let body = d.bytes()?.to_vec();
        let tag = d.array()?;
        d.finish()?;
        Ok(Self { body, tag })
    }
}

pub struct TranscriptAttestation;

const KEY_DOMAIN: &[u8] = b"A2DIDM/nizk-key\0";
const PROOF_DOMAIN: &[u8] = b"A2DIDM/nizk-att\0";

fn attest(key: &AttestationKey, statement: &[u8], body: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(PROOF_DOMAIN);
    h.update(key.0);
    h.update((statement.len() as u64).to_le_bytes());
    h.update(statement);
    h.update((body.len() as u64).to_le_bytes());
    h.update(body);
    h.finalize().into()
}

impl NizkBackend for TranscriptAttestation {
    type Params = NizkParams;
    type ProvingKey = AttestationKey;
    type VerifyingKey = AttestationKey;
    type Proof = AttestedProof;

    fn gen(seed: &str, relation: &str) -> NizkParams {
        NizkParams {
            seed: seed.to_string(),
            relation: relation.to_string(),
        }
    }

    fn key_gen(pp: &NizkParams) -> (AttestationKey, AttestationKey) {
        let mut h = Sha256::new();
        h.update(KEY_DOMAIN);
        for part in [pp.seed.as_bytes(), pp.relation.as_bytes()] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part);
        }
        let k = AttestationKey(h.finalize().into());
        (k, k)
    }

    fn prove(pk: &AttestationKey, statement: &[u8], body: Vec<u8>) -> AttestedProof {
        let tag = attest(pk, statement, &body);
        AttestedProof { body, tag }
    }

    fn verify(vk: &AttestationKey, statement: &[u8], proof: &AttestedProof) -> bool {
        attest(vk, statement, &proof.body) == proof.tag
    }
}
