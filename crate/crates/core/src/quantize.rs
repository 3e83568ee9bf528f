//! Fixed-point encoding of real-valued weights into a prime field.
//!
//! A real `x` maps to `round(x · 2^scale_bits)` (half away from zero); negative
//! values wrap to `modulus − |q|`.

use ark_ff::{BigInteger, PrimeField};
use thiserror::Error;

pub const DEFAULT_SCALE_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizeError {
    #[error("entry {index} ({value}) is not finite")]
    NonFinite { index: usize, value: f64 },
    #[error("entry {index} ({value}) overflows the fixed-point range at scale 2^{scale_bits}")]
    Overflow {
        index: usize,
        value: f64,
        scale_bits: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedVector<F> {
    pub values: Vec<F>,
    pub scale_bits: u32,
}

fn magnitude_bits<F: PrimeField>() -> u32 {
    // |q| < 2^bits keeps q below modulus/2 and inside i128.
    (F::MODULUS_BIT_SIZE - 2).min(126)
}

pub fn quantize<F: PrimeField>(
    v: &[f64],
    scale_bits: u32,
) -> Result<QuantizedVector<F>, QuantizeError> {
    let scale = 2f64.powi(scale_bits as i32);
    let limit = 2f64.powi(magnitude_bits::<F>() as i32);
    let values = v
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !value.is_finite() {
                return Err(QuantizeError::NonFinite { index, value });
            }
            let q = (value * scale).round();
            if !q.is_finite() || q.abs() >= limit {
                return Err(QuantizeError::Overflow {
                    index,
                    value,
                    scale_bits,
                });
            }
            let mag = F::from(q.abs() as u128);
            Ok(if q < 0.0 { -mag } else { mag })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantizedVector { values, scale_bits })
}

/// Signed integer behind a field element produced by [`quantize`].
pub fn signed_value<F: PrimeField>(x: &F) -> i128 {
    let big = x.into_bigint();
    let (neg, mag) = if big > F::MODULUS_MINUS_ONE_DIV_TWO {
        (true, (-*x).into_bigint())
    } else {
        (false, big)
    };
    let limbs = mag.as_ref();
    let low = limbs[0] as u128 | (limbs.get(1).copied().unwrap_or(0) as u128) << 64;
    debug_assert!(mag.num_bits() <= 127);
    if neg {
        -(low as i128)
    } else {
        low as i128
    }
}

pub fn dequantize<F: PrimeField>(q: &QuantizedVector<F>) -> Vec<f64> {
    let scale = 2f64.powi(q.scale_bits as i32);
    q.values
        .iter()
        .map(|x| signed_value(x) as f64 / scale)
        .collect()
}
