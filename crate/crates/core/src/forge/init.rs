use super::rng;
use crate::checkpoint::{Architecture, WeightCheckpoint};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Distribution every initial parameter is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitSpec {
    /// Two-component Gaussian mixture.
    Gmm2 {
        weights: [f64; 2],
        means: [f64; 2],
        stds: [f64; 2],
    },
    Gaussian { mean: f64, std: f64 },
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::Gmm2 {
            weights: [0.5, 0.5],
            means: [-0.3, 0.3],
            stds: [0.1, 0.1],
        }
    }
}

impl InitSpec {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            InitSpec::Gmm2 {
                weights,
                stds,
                means,
            } => {
                if weights.iter().any(|w| !(0.0..=1.0).contains(w))
                    || (weights[0] + weights[1] - 1.0).abs() > 1e-9
                {
                    return Err(format!("invalid mixture weights {weights:?}"));
                }
                if stds.iter().any(|s| !(*s > 0.0)) || means.iter().any(|m| !m.is_finite()) {
                    return Err("mixture stds must be > 0 and means finite".into());
                }
            }
            InitSpec::Gaussian { mean, std } => {
                if !(std > 0.0) || !mean.is_finite() {
                    return Err("gaussian std must be > 0".into());
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitSpec::Gmm2 {
                weights,
                means,
                stds,
            } => {
                let k = usize::from(rng.gen::<f64>() >= weights[0]);
                Normal::new(means[k], stds[k]).unwrap().sample(rng)
            }
            InitSpec::Gaussian { mean, std } => Normal::new(mean, std).unwrap().sample(rng),
        }
    }
}

/// Epoch-0 checkpoint with every scalar drawn iid from `spec`.
pub fn init_weights(arch: &Architecture, spec: &InitSpec, seed: u64) -> WeightCheckpoint {
    let mut r = rng(seed);
    let mut w = WeightCheckpoint::zeros(arch, 0);
    for l in &mut w.layers {
        for x in l.weights.iter_mut().chain(l.bias.iter_mut()) {
            *x = spec.sample(&mut r);
        }
    }
    w
}
