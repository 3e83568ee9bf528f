//! Genuine and forged checkpoint sequences for exercising the predicates.

mod attack;
mod data;
mod init;
mod mlp;
mod toy;
mod train;

pub use attack::{
    attack_cfa, attack_mda, attack_rca, forge_attack, AttackConfig, AttackFamily, MdaLoss,
    PoisonSchedule,
};
pub use data::{gen_synthetic_dataset, SyntheticDataset};
pub use init::{init_weights, InitSpec};
pub use mlp::{accuracy, predict_probs};
pub use toy::{toy_arch, toy_dataset, toy_run, TOY_SAMPLES, TOY_WIDTHS};
pub use train::{train_sequence, ForgeError, TrainConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub(crate) fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
