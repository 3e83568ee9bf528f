//! Owner address keys and proving/verification keys.

use crate::codec::{expect_section, section, Dec, Enc, TAG_ADDRKEYS, TAG_PROOFKEY};
use crate::nizk::{AttestationKey, NizkBackend, TranscriptAttestation};
use crate::params::PublicParams;
use crate::ProtocolError;
use didm_crypto::curve::{g1_to_bytes, scalar_from_seed};
use didm_crypto::{crh_bytes, cs_commit, digest_bytes, tag, Commitment, OpCounter, Scalar, Tag};
use sha2::{Digest, Sha256};

pub const TAG_VK_IN: Tag = tag("vk-in");
pub const TAG_VK_R: Tag = tag("vk-r");

/// `IRSK = (sk_PR, cr_kp)` and `IRPK = Commit(sk_PR; cr_kp)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AddressKeys {
    pub sk_pr: Scalar,
    pub cr_kp: Scalar,
    pub irpk: Commitment,
}

pub fn addr_gen(pp: &PublicParams, seed: u64) -> Result<AddressKeys, ProtocolError> {
    let mut label = b"A2DIDM/addr/".to_vec();
    label.extend_from_slice(&seed.to_le_bytes());
    let sk_pr = scalar_from_seed(&label, 0);
    let cr_kp = scalar_from_seed(&label, 1);
    let irpk = cs_commit(&pp.commit, &[sk_pr], &cr_kp, &mut OpCounter::new())?;
    Ok(AddressKeys { sk_pr, cr_kp, irpk })
}

impl AddressKeys {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.scalar(&self.sk_pr).scalar(&self.cr_kp).g1(&self.irpk.0);
        section(TAG_ADDRKEYS, &e.finish())
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(b, TAG_ADDRKEYS)?);
        let k = Self {
            sk_pr: d.scalar()?,
            cr_kp: d.scalar()?,
            irpk: Commitment(d.g1()?),
        };
        d.finish()?;
        Ok(k)
    }
}

/// Key for one relation: the backend key plus the SRS view it is tied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationKey {
    pub key: AttestationKey,
    /// SHA-256 of the encoded SRS.
    pub srs_digest: [u8; 32],
    pub degree_bound: u32,
}

impl RelationKey {
    fn encode(&self, e: &mut Enc) {
        e.raw(&self.key.0).raw(&self.srs_digest).u32(self.degree_bound);
    }

    fn decode(d: &mut Dec) -> Result<Self, ProtocolError> {
        Ok(Self {
            key: AttestationKey(d.array()?),
            srs_digest: d.array()?,
            degree_bound: d.u32()?,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        self.encode(&mut e);
        e.finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvingKey {
    pub pk_r: RelationKey,
    pub pk_in: RelationKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyingKey {
    pub vk_r: RelationKey,
    pub vk_in: RelationKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofKeys {
    pub pk: ProvingKey,
    pub vk: VerifyingKey,
}

fn srs_digest(pp: &PublicParams) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in pp.srs.g1_powers() {
        h.update(g1_to_bytes(p));
    }
    h.update(didm_crypto::curve::g2_to_bytes(&pp.srs.g2()));
    h.update(didm_crypto::curve::g2_to_bytes(&pp.srs.tau_g2()));
    h.finalize().into()
}

pub fn key_gen(pp: &PublicParams) -> ProofKeys {
    let srs = srs_digest(pp);
    let degree_bound = pp.degree() as u32;
    let rel = |params| {
        let (pk, vk) = TranscriptAttestation::key_gen(params);
        let wrap = |key| RelationKey {
            key,
            srs_digest: srs,
            degree_bound,
        };
        (wrap(pk), wrap(vk))
    };
    let (pk_r, vk_r) = rel(&pp.zk);
    let (pk_in, vk_in) = rel(&pp.zk_in);
    ProofKeys {
        pk: ProvingKey { pk_r, pk_in },
        vk: VerifyingKey { vk_r, vk_in },
    }
}

impl VerifyingKey {
    /// `h(vk_in)`.
    pub fn vk_in_digest(&self, pp: &PublicParams) -> Scalar {
        crh_bytes(&pp.hash, &TAG_VK_IN, &self.vk_in.to_bytes())
    }

    pub fn vk_r_digest(&self, pp: &PublicParams) -> Scalar {
        crh_bytes(&pp.hash, &TAG_VK_R, &self.vk_r.to_bytes())
    }
}

impl ProofKeys {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        for k in [&self.pk.pk_r, &self.pk.pk_in, &self.vk.vk_r, &self.vk.vk_in] {
            k.encode(&mut e);
        }
        section(TAG_PROOFKEY, &e.finish())
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(b, TAG_PROOFKEY)?);
        let pk_r = RelationKey::decode(&mut d)?;
        let pk_in = RelationKey::decode(&mut d)?;
        let vk_r = RelationKey::decode(&mut d)?;
        let vk_in = RelationKey::decode(&mut d)?;
        d.finish()?;
        Ok(Self {
            pk: ProvingKey { pk_r, pk_in },
            vk: VerifyingKey { vk_r, vk_in },
        })
    }
}

/// Hex of a 32-byte scalar digest, for display.
pub fn digest_hex(s: &Scalar) -> String {
    digest_bytes(s).iter().map(|b| format!("{b:02x}")).collect()
}
