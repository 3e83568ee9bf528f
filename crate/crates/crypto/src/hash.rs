//! Collision-resistant hashing into the scalar field.
//!
//! Two interchangeable variants: an algebraic sponge with a Poseidon-style
//! permutation (the default), and a chained Pedersen hash over G1 kept for
//! comparison benchmarks. Every call carries a 16-byte domain tag.

use crate::curve::{hash_to_g1, scalar_from_seed, scalar_to_bytes, G1Affine, Scalar, G1};
use ark_ec::{AffineRepr, CurveGroup, VariableBaseMSM};
use ark_ff::{BigInteger, Field, PrimeField, Zero};
use ark_serialize::CanonicalSerialize;
use std::fmt;
use std::str::FromStr;

pub type Tag = [u8; 16];

/// `A2DIDM/<ctx>` padded with NUL bytes. `ctx` may be at most 9 bytes.
pub const fn tag(ctx: &str) -> Tag {
    let prefix = b"A2DIDM/";
    let c = ctx.as_bytes();
    assert!(c.len() <= 9, "domain tag context longer than 9 bytes");
    let mut out = [0u8; 16];
    let mut i = 0;
    while i < prefix.len() {
        out[i] = prefix[i];
        i += 1;
    }
    let mut j = 0;
    while j < c.len() {
        out[prefix.len() + j] = c[j];
        j += 1;
    }
    out
}

pub const DEFAULT_SPONGE_SEED: &str = "A2DIDM poseidon-like sponge v1";
pub const DEFAULT_PEDERSEN_SEED: &str = "A2DIDM pedersen hash v1";

const WIDTH: usize = 3;
const FULL_ROUNDS: usize = 8;
const PARTIAL_ROUNDS: usize = 31;
/// Message scalars per Pedersen block.
const PEDERSEN_BLOCK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashVariant {
    Sponge,
    Pedersen,
}

impl fmt::Display for HashVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HashVariant::Sponge => "algebraic-sponge",
            HashVariant::Pedersen => "group-based",
        })
    }
}

impl FromStr for HashVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "algebraic-sponge" | "sponge" | "poseidon" => Ok(HashVariant::Sponge),
            "group-based" | "pedersen" => Ok(HashVariant::Pedersen),
            _ => Err(format!("unknown hash variant {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
struct Sponge {
    alpha: u64,
    round_constants: Vec<[Scalar; WIDTH]>,
    mds: [[Scalar; WIDTH]; WIDTH],
}

/// Smallest α ≥ 3 with gcd(α, r − 1) = 1, so `x ↦ x^α` permutes the field.
fn sbox_exponent() -> u64 {
    let mut m = Scalar::MODULUS;
    m.sub_with_borrow(&1u64.into());
    let limbs = m.as_ref();
    (3u64..)
        .find(|&a| {
            let rem = limbs
                .iter()
                .rev()
                .fold(0u128, |acc, &l| ((acc << 64) | l as u128) % a as u128);
            gcd(rem as u64, a) == 1
        })
        .unwrap()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Sponge {
    fn new(seed: &str) -> Self {
        let rounds = FULL_ROUNDS + PARTIAL_ROUNDS;
        let round_constants = (0..rounds)
            .map(|r| std::array::from_fn(|i| scalar_from_seed(seed.as_bytes(), (r * WIDTH + i) as u64)))
            .collect();
        // Cauchy matrix 1 / (x_i + y_j) with x = (0,1,2), y = (3,4,5): every
        // square submatrix is invertible.
        let mds = std::array::from_fn(|i| {
            std::array::from_fn(|j| Scalar::from((i + WIDTH + j) as u64).inverse().unwrap())
        });
        Self {
            alpha: sbox_exponent(),
            round_constants,
            mds,
        }
    }

    fn permute(&self, s: &mut [Scalar; WIDTH]) {
        let half = FULL_ROUNDS / 2;
        for (r, rc) in self.round_constants.iter().enumerate() {
            for (x, c) in s.iter_mut().zip(rc) {
                *x += c;
            }
            let full = r < half || r >= half + PARTIAL_ROUNDS;
            let n = if full { WIDTH } else { 1 };
            for x in s.iter_mut().take(n) {
                *x = x.pow([self.alpha]);
            }
            let prev = *s;
            for (i, row) in self.mds.iter().enumerate() {
                s[i] = row.iter().zip(&prev).map(|(m, x)| *m * x).sum();
            }
        }
    }

    fn hash(&self, cap: Scalar, msg: &[Scalar]) -> Scalar {
        let mut s = [cap, Scalar::zero(), Scalar::zero()];
        if msg.is_empty() {
            self.permute(&mut s);
        }
        for chunk in msg.chunks(WIDTH - 1) {
            for (x, m) in s[1..].iter_mut().zip(chunk) {
                *x += m;
            }
            self.permute(&mut s);
        }
        s[1]
    }
}

fn x_to_scalar(p: &G1Affine) -> Scalar {
    if p.is_zero() {
        return Scalar::zero();
    }
    let mut b = Vec::with_capacity(48);
    p.x.serialize_compressed(&mut b).unwrap();
    Scalar::from_le_bytes_mod_order(&b)
}

#[derive(Debug, Clone)]
enum Inner {
    Sponge(Sponge),
    Pedersen(Vec<G1Affine>),
}

/// Hash parameters (`pp_H`), regenerated deterministically from the seed.
#[derive(Debug, Clone)]
pub struct HashParams {
    variant: HashVariant,
    seed: String,
    inner: Inner,
}

impl PartialEq for HashParams {
    fn eq(&self, other: &Self) -> bool {
        self.variant == other.variant && self.seed == other.seed
    }
}

impl Default for HashParams {
    fn default() -> Self {
        Self::new(HashVariant::Sponge, DEFAULT_SPONGE_SEED)
    }
}

impl HashParams {
    pub fn new(variant: HashVariant, seed: &str) -> Self {
        let inner = match variant {
            HashVariant::Sponge => Inner::Sponge(Sponge::new(seed)),
            HashVariant::Pedersen => Inner::Pedersen(
                (0..=PEDERSEN_BLOCK as u64)
                    .map(|i| hash_to_g1(seed.as_bytes(), i))
                    .collect(),
            ),
        };
        Self {
            variant,
            seed: seed.to_string(),
            inner,
        }
    }

    pub fn pedersen_default() -> Self {
        Self::new(HashVariant::Pedersen, DEFAULT_PEDERSEN_SEED)
    }

    pub fn variant(&self) -> HashVariant {
        self.variant
    }

    pub fn seed(&self) -> &str {
        &self.seed
    }

    /// S-box exponent of the sponge permutation (None for the group variant).
    pub fn sbox_alpha(&self) -> Option<u64> {
        match &self.inner {
            Inner::Sponge(s) => Some(s.alpha),
            Inner::Pedersen(_) => None,
        }
    }
}

/// Capacity element: the tag and the message length, so messages of
/// different lengths or tags never share a sponge state.
fn capacity(tag: &Tag, len: usize) -> Scalar {
    let mut b = [0u8; 24];
    b[..16].copy_from_slice(tag);
    b[16..].copy_from_slice(&(len as u64).to_le_bytes());
    Scalar::from_le_bytes_mod_order(&b)
}

/// Digest of a scalar list under a domain tag.
pub fn crh_val(pp: &HashParams, tag: &Tag, msg: &[Scalar]) -> Scalar {
    let cap = capacity(tag, msg.len());
    match &pp.inner {
        Inner::Sponge(s) => s.hash(cap, msg),
        Inner::Pedersen(gens) => {
            let mut acc = Scalar::zero();
            let mut seq = Vec::with_capacity(msg.len() + 1);
            seq.push(cap);
            seq.extend_from_slice(msg);
            for block in seq.chunks(PEDERSEN_BLOCK) {
                let mut scalars = vec![acc];
                scalars.extend_from_slice(block);
                let p = G1::msm(&gens[..scalars.len()], &scalars).unwrap();
                acc = x_to_scalar(&p.into_affine());
            }
            acc
        }
    }
}

/// Packs bytes 31 at a time (each chunk is below the modulus) after a
/// byte-length prefix.
pub fn bytes_to_scalars(bytes: &[u8]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(1 + bytes.len().div_ceil(31));
    out.push(Scalar::from(bytes.len() as u64));
    out.extend(bytes.chunks(31).map(Scalar::from_le_bytes_mod_order));
    out
}

pub fn crh_bytes(pp: &HashParams, tag: &Tag, bytes: &[u8]) -> Scalar {
    crh_val(pp, tag, &bytes_to_scalars(bytes))
}

/// 32-byte digest form.
pub fn digest_bytes(d: &Scalar) -> [u8; 32] {
    scalar_to_bytes(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ff::{One, UniformRand};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const T: Tag = tag("test");

    #[test]
    fn tag_layout() {
        assert_eq!(&T, b"A2DIDM/test\0\0\0\0\0");
        assert_eq!(tag("123456789").len(), 16);
    }

    #[test]
    fn sbox_is_a_permutation_exponent() {
        // r − 1 is divisible by 2, 3, 5 and 7.
        assert_eq!(HashParams::default().sbox_alpha(), Some(11));
    }

    #[test]
    fn deterministic_and_tag_separated() {
        for pp in [HashParams::default(), HashParams::pedersen_default()] {
            let m = [Scalar::from(1u64), Scalar::from(2u64), Scalar::from(3u64)];
            assert_eq!(crh_val(&pp, &T, &m), crh_val(&pp, &T, &m));
            assert_ne!(crh_val(&pp, &T, &m), crh_val(&pp, &tag("other"), &m));
            // Trailing zero must not collide with the shorter message.
            assert_ne!(crh_val(&pp, &T, &m[..2]), crh_val(&pp, &T, &[m[0], m[1], Scalar::zero()]));
            // Empty message is well-defined and tag-dependent.
            assert_ne!(crh_val(&pp, &T, &[]), crh_val(&pp, &tag("x"), &[]));
        }
    }

    #[test]
    fn variants_differ() {
        let m = [Scalar::one()];
        assert_ne!(
            crh_val(&HashParams::default(), &T, &m),
            crh_val(&HashParams::pedersen_default(), &T, &m)
        );
    }

    #[test]
    fn bit_flips_change_digest() {
        let mut r = ChaCha20Rng::seed_from_u64(3);
        for pp in [HashParams::default(), HashParams::pedersen_default()] {
            let mut seen = std::collections::HashSet::new();
            for _ in 0..1000 {
                let mut bytes = [0u8; 40];
                rand::RngCore::fill_bytes(&mut r, &mut bytes);
                let d = crh_bytes(&pp, &T, &bytes);
                let bit = rand::Rng::gen_range(&mut r, 0..320);
                bytes[bit / 8] ^= 1 << (bit % 8);
                assert_ne!(crh_bytes(&pp, &T, &bytes), d);
                assert!(seen.insert(digest_bytes(&d)));
            }
        }
    }

    #[test]
    fn byte_packing_is_injective_on_length() {
        let pp = HashParams::default();
        assert_ne!(crh_bytes(&pp, &T, b"ab"), crh_bytes(&pp, &T, b"ab\0"));
        assert_eq!(bytes_to_scalars(&[7u8; 62]).len(), 3);
    }

    #[test]
    fn permutation_is_not_identity() {
        let pp = HashParams::default();
        let mut r = ChaCha20Rng::seed_from_u64(4);
        let x = Scalar::rand(&mut r);
        assert_ne!(crh_val(&pp, &T, &[x]), x);
    }
}
