use super::data::SyntheticDataset;
use super::init::{init_weights, InitSpec};
use super::mlp::{backward, forward, softmax};
use super::rng;
use crate::checkpoint::{Architecture, CheckpointError, CheckpointSequence, Layer, WeightCheckpoint};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForgeError {
    #[error("training diverged (non-finite loss or weights) in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

/// Plain minibatch SGD on softmax cross-entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 0.1,
            batch_size: 32,
        }
    }
}

impl TrainConfig {
    pub(crate) fn validate(&self) -> Result<(), ForgeError> {
        if self.epochs == 0 || !(self.learning_rate > 0.0) || self.batch_size == 0 {
            return Err(ForgeError::Config(format!(
                "need epochs >= 1, learning_rate > 0, batch_size >= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reduction {
    Mean,
    Sum,
}

/// Per-sample loss gradient with respect to the logits, plus an optional
/// parameter-space regularizer applied once per minibatch.
pub(crate) trait Objective {
    /// Writes ∂loss/∂logits for sample `i` into `out` and returns the loss.
    fn sample(&self, i: usize, probs: &[f64], out: &mut [f64]) -> f64;

    fn reduction(&self) -> Reduction {
        Reduction::Mean
    }

    fn regularize(&self, _w: &WeightCheckpoint, _grads: &mut [Layer]) {}
}

pub(crate) struct CrossEntropy<'a> {
    pub labels: &'a [usize],
}

impl Objective for CrossEntropy<'_> {
    fn sample(&self, i: usize, probs: &[f64], out: &mut [f64]) -> f64 {
        out.copy_from_slice(probs);
        out[self.labels[i]] -= 1.0;
        -probs[self.labels[i]].max(1e-300).ln()
    }
}

/// One pass over `data` in a fresh random order. Returns the mean sample loss.
pub(crate) fn run_epoch<R: Rng>(
    w: &mut WeightCheckpoint,
    data: &SyntheticDataset,
    obj: &dyn Objective,
    lr: f64,
    batch_size: usize,
    rng: &mut R,
    epoch: usize,
) -> Result<f64, ForgeError> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(rng);
    let mut grads: Vec<Layer> = w.layers.iter().map(|l| Layer::zeros(l.shape())).collect();
    let mut dlogits = vec![0.0; data.classes];
    let mut total = 0.0;
    for batch in order.chunks(batch_size) {
        for g in &mut grads {
            g.weights.iter_mut().for_each(|v| *v = 0.0);
            g.bias.iter_mut().for_each(|v| *v = 0.0);
        }
        let scale = match obj.reduction() {
            Reduction::Mean => 1.0 / batch.len() as f64,
            Reduction::Sum => 1.0,
        };
        for &i in batch {
            let acts = forward(w, data.row(i));
            let probs = softmax(&acts[acts.len() - 1]);
            total += obj.sample(i, &probs, &mut dlogits);
            backward(w, &acts, &dlogits, &mut grads, scale);
        }
        obj.regularize(w, &mut grads);
        for (l, g) in w.layers.iter_mut().zip(&grads) {
            for (p, d) in l.weights.iter_mut().zip(&g.weights) {
                *p -= lr * d;
            }
            for (p, d) in l.bias.iter_mut().zip(&g.bias) {
                *p -= lr * d;
            }
        }
    }
    let mean = total / data.len().max(1) as f64;
    let finite = w
        .layers
        .iter()
        .all(|l| l.weights.iter().chain(&l.bias).all(|x| x.is_finite()));
    if !mean.is_finite() || !finite {
        return Err(ForgeError::Diverged { epoch });
    }
    Ok(mean)
}

pub(crate) fn check_compatible(arch: &Architecture, data: &SyntheticDataset) -> Result<(), ForgeError> {
    if arch.input_dim() != data.dim || arch.output_dim() != data.classes {
        return Err(ForgeError::Config(format!(
            "architecture {}→{} does not fit data with {} features and {} classes",
            arch.input_dim(),
            arch.output_dim(),
            data.dim,
            data.classes
        )));
    }
    if data.is_empty() {
        return Err(ForgeError::Config("empty dataset".into()));
    }
    Ok(())
}

/// Trains from `init_weights(arch, spec, seed)` and records the initial
/// checkpoint plus one checkpoint after every epoch (`P + 1` in total).
pub fn train_sequence(
    arch: &Architecture,
    data: &SyntheticDataset,
    cfg: &TrainConfig,
    spec: &InitSpec,
    seed: u64,
) -> Result<CheckpointSequence, ForgeError> {
    cfg.validate()?;
    spec.validate().map_err(ForgeError::Config)?;
    check_compatible(arch, data)?;
    let mut w = init_weights(arch, spec, seed);
    let mut order_rng = rng(seed ^ 0x7261_696e_5f6f_7264);
    let obj = CrossEntropy {
        labels: &data.labels,
    };
    let mut out = Vec::with_capacity(cfg.epochs + 1);
    out.push(w.clone());
    for epoch in 1..=cfg.epochs {
        run_epoch(&mut w, data, &obj, cfg.learning_rate, cfg.batch_size, &mut order_rng, epoch)?;
        w.epoch = epoch;
        out.push(w.clone());
    }
    Ok(CheckpointSequence::new(arch.clone(), out)?)
}
