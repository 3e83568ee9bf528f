//! Weight-checkpoint data model, the three training-integrity predicates and
//! generators for genuine and forged checkpoint sequences.
//!
//! Everything in this crate is plain `f64` numerics; the only contact with
//! field arithmetic is [`quantize`], which is generic over any
//! [`ark_ff::PrimeField`].

pub mod checkpoint;
pub mod codec;
pub mod forge;
pub mod predicate;
pub mod quantize;

pub use checkpoint::{
    dl_distance, Architecture, CheckpointError, CheckpointSequence, Layer, LayerShape,
    WeightCheckpoint,
};
pub use codec::{decode_sequence, encode_sequence, DecodeError};
pub use quantize::{dequantize, quantize, QuantizeError, QuantizedVector, DEFAULT_SCALE_BITS};
