use super::rng;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

/// Separation between neighbouring class means, in units of the per-feature std.
pub const MEAN_SEPARATION: f64 = 4.0;

/// Row-major `n × d` inputs with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub inputs: Vec<f64>,
    pub dim: usize,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl SyntheticDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn subset(&self, idx: &[usize]) -> SyntheticDataset {
        let mut inputs = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            inputs.extend_from_slice(self.row(i));
        }
        SyntheticDataset {
            inputs,
            dim: self.dim,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
        }
    }

    /// Mean of class `c` as constructed by [`gen_synthetic_dataset`].
    pub fn class_mean(dim: usize, c: usize) -> Vec<f64> {
        let mut m = vec![0.0; dim];
        m[c % dim] = MEAN_SEPARATION / std::f64::consts::SQRT_2 * (1 + c / dim) as f64;
        m
    }
}

/// Gaussian blobs with unit variance. Class `c` is centred on axis `c mod d`
/// so the first `d` class means are pairwise [`MEAN_SEPARATION`] apart.
pub fn gen_synthetic_dataset(n: usize, d: usize, classes: usize, seed: u64) -> SyntheticDataset {
    assert!(classes >= 2 && d >= 2 && n >= 1, "need classes >= 2, d >= 2, n >= 1");
    let mut r = rng(seed);
    let mut labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    labels.shuffle(&mut r);
    let means: Vec<Vec<f64>> = (0..classes)
        .map(|c| SyntheticDataset::class_mean(d, c))
        .collect();
    let mut inputs = Vec::with_capacity(n * d);
    for &y in &labels {
        for k in 0..d {
            let z: f64 = StandardNormal.sample(&mut r);
            inputs.push(means[y][k] + z);
        }
    }
    SyntheticDataset {
        inputs,
        dim: d,
        labels,
        classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nearest_mean_accuracy(data: &SyntheticDataset) -> f64 {
        let means: Vec<_> = (0..data.classes)
            .map(|c| SyntheticDataset::class_mean(data.dim, c))
            .collect();
        let hits = (0..data.len())
            .filter(|&i| {
                let x = data.row(i);
                let best = (0..data.classes)
                    .min_by(|&a, &b| {
                        let da: f64 = x.iter().zip(&means[a]).map(|(u, v)| (u - v).powi(2)).sum();
                        let db: f64 = x.iter().zip(&means[b]).map(|(u, v)| (u - v).powi(2)).sum();
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                best == data.labels[i]
            })
            .count();
        hits as f64 / data.len() as f64
    }

    #[test]
    fn deterministic_and_labels_in_range() {
        let a = gen_synthetic_dataset(200, 4, 3, 5);
        assert_eq!(a, gen_synthetic_dataset(200, 4, 3, 5));
        assert!(a.labels.iter().all(|&y| y < 3));
        assert_ne!(a, gen_synthetic_dataset(200, 4, 3, 6));
    }

    #[test]
    fn linear_rule_reaches_bayes_rate() {
        // Monte-Carlo estimate of the Bayes accuracy for two unit-variance
        // blobs 4 std apart: project onto the mean difference, count the
        // fraction of N(0,1) draws below half the separation.
        let mut r = rng(77);
        let trials = 200_000;
        let below = (0..trials)
            .filter(|_| {
                let z: f64 = StandardNormal.sample(&mut r);
                z < MEAN_SEPARATION / 2.0
            })
            .count();
        let bayes = below as f64 / trials as f64;
        assert!(bayes > 0.97);

        let data = gen_synthetic_dataset(1000, 4, 2, 11);
        let acc = nearest_mean_accuracy(&data);
        assert!(acc >= 0.95, "accuracy {acc}, bayes rate {bayes}");
    }
}
