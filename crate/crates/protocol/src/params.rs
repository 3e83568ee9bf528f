//! Public parameters and their file encoding.

use crate::codec::{expect_section, section, Dec, Enc, TAG_PPARAMS};
use crate::nizk::{NizkBackend, NizkParams, TranscriptAttestation};
use crate::ProtocolError;
use didm_crypto::{pc_setup, CommitParams, HashParams, HashVariant, Srs, CURVE_ID};

pub const FORMAT_VERSION: u16 = 1;
pub const SECURITY_LEVEL: u32 = 128;

/// Relation identifiers for the outer and inner NIZK.
pub const RELATION_R: &str = "A2DIDM/R predicate satisfiability v1";
pub const RELATION_R_IN: &str = "A2DIDM/R_in openings and predicates v1";

/// Scalars in an IR message besides the quantized weights: the owner digest
/// and the three predicate identifiers.
pub const IR_HEADER_SCALARS: usize = 4;

/// `pp`: every component is regenerated from `master_seed`.
///
/// The commitment generators are the SRS G1 powers `τ^0·G1 … τ^(D−1)·G1`
/// with `τ^D·G1` as the blinding generator, so a commitment to message `m`
/// with randomness `r` is also the KZG commitment to
/// `Σ m_j X^j + r·X^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicParams {
    pub version: u16,
    pub lambda: u32,
    pub master_seed: u64,
    /// Largest flattened model the parameters are sized for.
    pub max_total_w: usize,
    pub hash: HashParams,
    pub commit: CommitParams,
    pub zk: NizkParams,
    pub zk_in: NizkParams,
    pub srs: Srs,
}

/// Sub-parameter seed strings, one per component.
pub fn sub_seed(label: &str, master_seed: u64) -> String {
    format!("A2DIDM/{label}/{master_seed}")
}

pub const SUB_SEED_LABELS: [&str; 5] = ["pp_H", "pp_C", "pp_ZK", "pp_in", "pp_ACS"];

pub fn didm_gen(lambda: u32, master_seed: u64, max_total_w: usize) -> Result<PublicParams, ProtocolError> {
    didm_gen_with(lambda, master_seed, max_total_w, HashVariant::Sponge)
}

pub fn didm_gen_with(
    lambda: u32,
    master_seed: u64,
    max_total_w: usize,
    variant: HashVariant,
) -> Result<PublicParams, ProtocolError> {
    if lambda != SECURITY_LEVEL {
        return Err(ProtocolError::Params(format!(
            "security level {lambda} unsupported (only {SECURITY_LEVEL})"
        )));
    }
    if max_total_w == 0 {
        return Err(ProtocolError::Params("max_total_w must be positive".into()));
    }
    let s = |l| sub_seed(l, master_seed);
    let hash = HashParams::new(variant, &s("pp_H"));
    let srs = pc_setup(max_total_w + IR_HEADER_SCALARS, s("pp_ACS").as_bytes())?;
    Ok(PublicParams {
        version: FORMAT_VERSION,
        lambda,
        master_seed,
        max_total_w,
        hash,
        commit: commit_params(&s("pp_C"), &srs),
        zk: TranscriptAttestation::gen(&s("pp_ZK"), RELATION_R),
        zk_in: TranscriptAttestation::gen(&s("pp_in"), RELATION_R_IN),
        srs,
    })
}

fn commit_params(seed: &str, srs: &Srs) -> CommitParams {
    let d = srs.max_degree();
    CommitParams::from_generators(seed, srs.g1_powers()[..d].to_vec(), srs.g1_powers()[d])
}

impl PublicParams {
    /// Degree `D` of the blinding term; also the degree bound of every
    /// opening instance.
    pub fn degree(&self) -> usize {
        self.srs.max_degree()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Enc::new();
        e.u16(self.version)
            .str(CURVE_ID)
            .u32(self.lambda)
            .u64(self.master_seed)
            .u64(self.max_total_w as u64)
            .str(&self.hash.variant().to_string())
            .str(self.hash.seed())
            .str(self.commit.seed());
        self.zk.encode(&mut e);
        self.zk_in.encode(&mut e);
        e.bytes(self.srs.seed()).u32(self.srs.g1_powers().len() as u32);
        for p in self.srs.g1_powers() {
            e.g1(p);
        }
        e.g2(&self.srs.g2()).g2(&self.srs.tau_g2());
        section(TAG_PPARAMS, &e.finish())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let mut d = Dec::new(expect_section(bytes, TAG_PPARAMS)?);
        let version = d.u16()?;
        if version != FORMAT_VERSION {
            return Err(ProtocolError::Encoding(format!("unsupported pp version {version}")));
        }
        let curve = d.str()?;
        if curve != CURVE_ID {
            return Err(ProtocolError::Encoding(format!("pp is for curve {curve}, expected {CURVE_ID}")));
        }
        let lambda = d.u32()?;
        let master_seed = d.u64()?;
        let max_total_w = d.u64()? as usize;
        let variant: HashVariant = d.str()?.parse().map_err(ProtocolError::Encoding)?;
        let hash_seed = d.str()?;
        let commit_seed = d.str()?;
        let zk = NizkParams::decode(&mut d)?;
        let zk_in = NizkParams::decode(&mut d)?;
        let srs_seed = d.bytes()?.to_vec();
        let n = d.count(48)?;
        let powers = (0..n).map(|_| d.g1()).collect::<Result<Vec<_>, _>>()?;
        let g2 = d.g2()?;
        let tau_g2 = d.g2()?;
        d.finish()?;
        if n != max_total_w + IR_HEADER_SCALARS + 1 {
            return Err(ProtocolError::Encoding(format!(
                "SRS has {n} powers, expected {}",
                max_total_w + IR_HEADER_SCALARS + 1
            )));
        }
        let srs = Srs::from_parts(srs_seed, powers, g2, tau_g2, &[1, n / 2, n - 1])?;
        Ok(Self {
            version,
            lambda,
            master_seed,
            max_total_w,
            hash: HashParams::new(variant, &hash_seed),
            commit: commit_params(&commit_seed, &srs),
            zk,
            zk_in,
            srs,
        })
    }
}
