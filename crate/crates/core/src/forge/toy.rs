//! The default desk-scale setup: a 4→16→2 MLP on 1000 two-class blobs,
//! trained for 20 epochs.

use super::{gen_synthetic_dataset, train_sequence, ForgeError, InitSpec, SyntheticDataset, TrainConfig};
use crate::checkpoint::{Architecture, CheckpointSequence};

pub const TOY_WIDTHS: [usize; 3] = [4, 16, 2];
pub const TOY_SAMPLES: usize = 1000;

pub fn toy_arch() -> Architecture {
    Architecture::mlp(&TOY_WIDTHS).expect("valid widths")
}

pub fn toy_dataset(seed: u64) -> SyntheticDataset {
    gen_synthetic_dataset(TOY_SAMPLES, TOY_WIDTHS[0], TOY_WIDTHS[2], seed)
}

/// One clean run; the dataset and the training share `seed`.
pub fn toy_run(seed: u64, epochs: usize) -> Result<(SyntheticDataset, CheckpointSequence), ForgeError> {
    let data = toy_dataset(seed);
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let seq = train_sequence(&toy_arch(), &data, &cfg, &InitSpec::default(), seed)?;
    Ok((data, seq))
}
