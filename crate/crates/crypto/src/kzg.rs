//! Pairing-based polynomial commitments with single-point openings.

use crate::curve::{scalar_from_seed, Curve, G1Affine, G2Affine, Scalar, G1, G2};
use crate::ops::OpCounter;
use crate::CryptoError;
use ark_ec::scalar_mul::fixed_base::FixedBase;
use ark_ec::pairing::Pairing;
use ark_ec::{CurveGroup, Group, VariableBaseMSM};
use ark_ff::{One, PrimeField, Zero};

/// Powers-of-τ reference string. τ is derived from `seed` and dropped; at
/// desk scale anyone holding the seed can recompute it.
#[derive(Debug, Clone, PartialEq)]
pub struct Srs {
    seed: Vec<u8>,
    g1_powers: Vec<G1Affine>,
    g2: G2Affine,
    tau_g2: G2Affine,
}

impl Srs {
    pub fn max_degree(&self) -> usize {
        self.g1_powers.len() - 1
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    pub fn g1_powers(&self) -> &[G1Affine] {
        &self.g1_powers
    }

    pub fn g1(&self) -> G1Affine {
        self.g1_powers[0]
    }

    pub fn g2(&self) -> G2Affine {
        self.g2
    }

    pub fn tau_g2(&self) -> G2Affine {
        self.tau_g2
    }

    /// Rebuilds an SRS from stored parts, checking the pairing relation
    /// between consecutive powers at the given indices.
    pub fn from_parts(
        seed: Vec<u8>,
        g1_powers: Vec<G1Affine>,
        g2: G2Affine,
        tau_g2: G2Affine,
        spot_checks: &[usize],
    ) -> Result<Self, CryptoError> {
        if g1_powers.len() < 2 {
            return Err(CryptoError::Encoding("SRS needs at least two G1 powers".into()));
        }
        let srs = Self {
            seed,
            g1_powers,
            g2,
            tau_g2,
        };
        for &k in spot_checks {
            if !srs.consistent_at(k) {
                return Err(CryptoError::Encoding(format!("SRS power {k} is inconsistent")));
            }
        }
        Ok(srs)
    }

    /// `e(τ^k·G1, G2) = e(τ^(k−1)·G1, τ·G2)`.
    pub fn consistent_at(&self, k: usize) -> bool {
        if k == 0 || k > self.max_degree() {
            return false;
        }
        Curve::pairing(self.g1_powers[k], self.g2) == Curve::pairing(self.g1_powers[k - 1], self.tau_g2)
    }
}

pub fn pc_setup(max_degree: usize, seed: &[u8]) -> Result<Srs, CryptoError> {
    if max_degree < 1 {
        return Err(CryptoError::Degree {
            degree: max_degree,
            max: 1,
        });
    }
    let mut tagged = b"kzg-tau/".to_vec();
    tagged.extend_from_slice(seed);
    let tau = scalar_from_seed(&tagged, 0);
    let mut powers = Vec::with_capacity(max_degree + 1);
    let mut acc = Scalar::one();
    for _ in 0..=max_degree {
        powers.push(acc);
        acc *= tau;
    }
    let scalar_bits = Scalar::MODULUS_BIT_SIZE as usize;
    let window = FixedBase::get_mul_window_size(powers.len());
    let table = FixedBase::get_window_table(scalar_bits, window, G1::generator());
    let g1_powers = G1::normalize_batch(&FixedBase::msm::<G1>(scalar_bits, window, &table, &powers));
    let g2 = G2::generator();
    Ok(Srs {
        seed: seed.to_vec(),
        g1_powers,
        g2: g2.into_affine(),
        tau_g2: (g2 * tau).into_affine(),
    })
}

fn degree_check(srs: &Srs, poly: &[Scalar]) -> Result<(), CryptoError> {
    if poly.len() > srs.g1_powers.len() {
        return Err(CryptoError::Degree {
            degree: poly.len() - 1,
            max: srs.max_degree(),
        });
    }
    Ok(())
}

/// `Σ coef_k · τ^k·G1`; coefficients are in ascending degree.
pub fn pc_commit(srs: &Srs, poly: &[Scalar], ops: &mut OpCounter) -> Result<G1Affine, CryptoError> {
    degree_check(srs, poly)?;
    ops.g1_muls += poly.len();
    Ok(G1::msm(&srs.g1_powers[..poly.len()], poly).unwrap().into_affine())
}

pub fn poly_eval(poly: &[Scalar], z: &Scalar) -> Scalar {
    poly.iter().rev().fold(Scalar::zero(), |acc, c| acc * z + c)
}

/// `(p(X) − p(z)) / (X − z)` by synthetic division.
pub fn quotient(poly: &[Scalar], z: &Scalar) -> Vec<Scalar> {
    if poly.len() <= 1 {
        return Vec::new();
    }
    let mut q = vec![Scalar::zero(); poly.len() - 1];
    let mut carry = Scalar::zero();
    for k in (1..poly.len()).rev() {
        carry = poly[k] + *z * carry;
        q[k - 1] = carry;
    }
    q
}

pub fn pc_open(srs: &Srs, poly: &[Scalar], z: &Scalar, ops: &mut OpCounter) -> Result<(Scalar, G1Affine), CryptoError> {
    degree_check(srs, poly)?;
    let v = poly_eval(poly, z);
    let pi = pc_commit(srs, &quotient(poly, z), ops)?;
    Ok((v, pi))
}

/// The two G1 operands of the rearranged check
/// `e(C − v·G1 + z·π, G2) = e(π, τ·G2)`.
pub(crate) fn check_operands(g1: &G1Affine, c: &G1Affine, z: &Scalar, v: &Scalar, pi: &G1Affine) -> G1 {
    G1::from(*c) - *g1 * v + *pi * z
}

/// One pairing-product check over the rearranged identity.
pub(crate) fn pairing_check(g2: &G2Affine, tau_g2: &G2Affine, lhs: G1, rhs: G1, ops: &mut OpCounter) -> bool {
    ops.pairings += 2;
    ops.pairing_checks += 1;
    let l = lhs.into_affine();
    let r = (-rhs).into_affine();
    Curve::multi_pairing([l, r], [*g2, *tau_g2]).is_zero()
}

pub fn pc_check(srs: &Srs, c: &G1Affine, z: &Scalar, v: &Scalar, pi: &G1Affine, ops: &mut OpCounter) -> bool {
    ops.g1_muls += 2;
    let lhs = check_operands(&srs.g1(), c, z, v, pi);
    pairing_check(&srs.g2, &srs.tau_g2, lhs, G1::from(*pi), ops)
}
