//! The three training-integrity predicates over a checkpoint sequence.
//!
//! * **CWCD** – the claimed initialization is much closer to the final
//!   weights than fresh random initializations are:
//!   `DL(W_0, W_P) ≤ DisMean − ε·DisStd`.
//! * **IWFW** – the initialization looks like an iid draw from a two-component
//!   Gaussian mixture: per-layer EMD to the mixture is small, and no
//!   single principal direction dominates the layer's rows.
//! * **MWCD** – adjacent checkpoints are δ-similar in mean bias and squared
//!   weight norm.

mod checks;
mod config;
mod emd;
mod gmm;
mod pca;
mod report;

pub use checks::{calibrate_delta, eval_cwcd, eval_iwfw, eval_mwcd, CwcdOutcome, IwfwOutcome, MwcdOutcome};
pub use config::{GmmReference, PredicateConfig, PredicateKind, GMM_COMPONENTS};
pub use emd::emd_1d;
pub use gmm::{fit_gmm2, GmmParams, MIN_SAMPLES, SIGMA_FLOOR};
pub use pca::{pca_max_ratio, PcaStat};
pub use report::PredicateReport;

use crate::checkpoint::{CheckpointError, CheckpointSequence};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredicateError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("non-finite sample")]
    NonFinite,
    #[error("invalid predicate configuration: {0}")]
    Config(String),
    #[error("malformed report: {0}")]
    Report(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

/// Evaluates all three predicates and assembles the report.
pub fn evaluate(seq: &CheckpointSequence, cfg: &PredicateConfig) -> Result<PredicateReport, PredicateError> {
    cfg.validate()?;
    let cwcd = eval_cwcd(seq, cfg, cfg.reference_seed)?;
    let iwfw = eval_iwfw(seq.initial(), cfg)?;
    let mwcd = eval_mwcd(seq, cfg)?;
    Ok(PredicateReport::assemble(cwcd, iwfw, mwcd))
}
