//! Curve aliases and canonical byte encodings.

use crate::CryptoError;
use ark_bls12_377::{Bls12_377, Fq};
use ark_ec::AffineRepr;
use ark_ff::PrimeField;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use sha2::{Digest, Sha256};

pub type Scalar = ark_bls12_377::Fr;
pub type G1 = ark_bls12_377::G1Projective;
pub type G1Affine = ark_bls12_377::G1Affine;
pub type G2 = ark_bls12_377::G2Projective;
pub type G2Affine = ark_bls12_377::G2Affine;
pub type Curve = Bls12_377;

/// Written into every parameter file and proof header.
pub const CURVE_ID: &str = "BLS12-377";

pub const SCALAR_BYTES: usize = 32;
pub const G1_BYTES: usize = 48;
pub const G2_BYTES: usize = 96;

pub fn scalar_to_bytes(s: &Scalar) -> [u8; SCALAR_BYTES] {
    let mut out = [0u8; SCALAR_BYTES];
    s.serialize_compressed(&mut out[..]).expect("32-byte buffer");
    out
}

/// Rejects non-canonical (unreduced) encodings.
pub fn scalar_from_bytes(b: &[u8]) -> Result<Scalar, CryptoError> {
    if b.len() != SCALAR_BYTES {
        return Err(CryptoError::Encoding(format!("scalar needs 32 bytes, got {}", b.len())));
    }
    Scalar::deserialize_compressed(b).map_err(|e| CryptoError::Encoding(format!("scalar: {e}")))
}

pub fn g1_to_bytes(p: &G1Affine) -> [u8; G1_BYTES] {
    let mut out = [0u8; G1_BYTES];
    p.serialize_compressed(&mut out[..]).expect("48-byte buffer");
    out
}

/// Checks the point is on the curve and in the prime-order subgroup.
pub fn g1_from_bytes(b: &[u8]) -> Result<G1Affine, CryptoError> {
    if b.len() != G1_BYTES {
        return Err(CryptoError::Encoding(format!("G1 point needs 48 bytes, got {}", b.len())));
    }
    G1Affine::deserialize_compressed(b).map_err(|e| CryptoError::Encoding(format!("G1 point: {e}")))
}

pub fn g2_to_bytes(p: &G2Affine) -> [u8; G2_BYTES] {
    let mut out = [0u8; G2_BYTES];
    p.serialize_compressed(&mut out[..]).expect("96-byte buffer");
    out
}

pub fn g2_from_bytes(b: &[u8]) -> Result<G2Affine, CryptoError> {
    if b.len() != G2_BYTES {
        return Err(CryptoError::Encoding(format!("G2 point needs 96 bytes, got {}", b.len())));
    }
    G2Affine::deserialize_compressed(b).map_err(|e| CryptoError::Encoding(format!("G2 point: {e}")))
}

/// Wide reduction of 64 bytes of SHA-256 output into a scalar.
pub fn scalar_from_seed(seed: &[u8], index: u64) -> Scalar {
    let mut wide = [0u8; 64];
    for (k, chunk) in wide.chunks_mut(32).enumerate() {
        let h = Sha256::new()
            .chain_update(b"A2DIDM/scalar\0\0\0")
            .chain_update((seed.len() as u64).to_le_bytes())
            .chain_update(seed)
            .chain_update(index.to_le_bytes())
            .chain_update([k as u8])
            .finalize();
        chunk.copy_from_slice(&h);
    }
    Scalar::from_le_bytes_mod_order(&wide)
}

/// Try-and-increment hash to G1: candidate x-coordinates from SHA-256 until
/// one lies on the curve, then clear the cofactor. Nobody knows the discrete
/// log of the result relative to any other output.
pub fn hash_to_g1(seed: &[u8], index: u64) -> G1Affine {
    for ctr in 0u64.. {
        let mut wide = [0u8; 64];
        for (k, chunk) in wide.chunks_mut(32).enumerate() {
            let h = Sha256::new()
                .chain_update(b"A2DIDM/h2c-g1\0\0\0")
                .chain_update((seed.len() as u64).to_le_bytes())
                .chain_update(seed)
                .chain_update(index.to_le_bytes())
                .chain_update(ctr.to_le_bytes())
                .chain_update([k as u8])
                .finalize();
            chunk.copy_from_slice(&h);
        }
        let x = Fq::from_le_bytes_mod_order(&wide[..63]);
        let greatest = wide[63] & 1 == 1;
        if let Some(p) = G1Affine::get_point_from_x_unchecked(x, greatest) {
            let p = p.clear_cofactor();
            if !p.is_zero() {
                return p;
            }
        }
    }
    unreachable!("counter space exhausted")
}
