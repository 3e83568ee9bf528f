//! Two-component 1-D Gaussian mixture fitted by expectation-maximization.

use super::PredicateError;
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub const SIGMA_FLOOR: f64 = 1e-6;
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmParams {
    pub weights: [f64; 2],
    pub means: [f64; 2],
    pub stds: [f64; 2],
}

impl GmmParams {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = usize::from(rng.gen::<f64>() >= self.weights[0]);
        Normal::new(self.means[k], self.stds[k]).unwrap().sample(rng)
    }

    fn log_component(&self, k: usize, x: f64) -> f64 {
        let s = self.stds[k];
        let z = (x - self.means[k]) / s;
        self.weights[k].ln() - 0.5 * z * z - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }

    pub fn log_likelihood(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| log_sum_exp(self.log_component(0, x), self.log_component(1, x)))
            .sum()
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Fits a two-component mixture. Means start at the 25th and 75th
/// percentiles with equal weights and the pooled standard deviation; EM runs
/// until the log-likelihood gains less than `tol` or `max_iters` is hit.
///
/// Samples are sorted before fitting, so the result does not depend on their
/// order.
pub fn fit_gmm2(samples: &[f64], max_iters: usize, tol: f64) -> Result<GmmParams, PredicateError> {
    if samples.len() < MIN_SAMPLES {
        return Err(PredicateError::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(PredicateError::NonFinite);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Fit around the median so a constant input stays exactly representable.
    let shift = xs[xs.len() / 2];
    xs.iter_mut().for_each(|x| *x -= shift);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let pooled = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
        .sqrt()
        .max(SIGMA_FLOOR);
    let mut p = GmmParams {
        weights: [0.5, 0.5],
        means: [percentile(&xs, 0.25), percentile(&xs, 0.75)],
        stds: [pooled, pooled],
    };
    let mut ll = p.log_likelihood(&xs);
    let mut resp = vec![0.0; xs.len()];
    for _ in 0..max_iters {
        // E-step: responsibility of component 0.
        for (r, &x) in resp.iter_mut().zip(&xs) {
            let a = p.log_component(0, x);
            let b = p.log_component(1, x);
            *r = (a - log_sum_exp(a, b)).exp();
        }
        // M-step
        let mut next = p;
        for k in 0..2 {
            let w = |r: f64| if k == 0 { r } else { 1.0 - r };
            let nk: f64 = resp.iter().map(|&r| w(r)).sum();
            next.weights[k] = nk / n;
            if nk > 0.0 {
                let mu = resp.iter().zip(&xs).map(|(&r, &x)| w(r) * x).sum::<f64>() / nk;
                let var = resp
                    .iter()
                    .zip(&xs)
                    .map(|(&r, &x)| w(r) * (x - mu).powi(2))
                    .sum::<f64>()
                    / nk;
                next.means[k] = mu;
                next.stds[k] = var.sqrt().max(SIGMA_FLOOR);
            }
        }
        let next_ll = next.log_likelihood(&xs);
        let gain = next_ll - ll;
        p = next;
        ll = next_ll;
        if !(gain >= tol) {
            break;
        }
    }
    p.means.iter_mut().for_each(|m| *m += shift);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mixture(n: usize, seed: u64) -> Vec<f64> {
        let mut r = ChaCha20Rng::seed_from_u64(seed);
        let a = Normal::new(-1.0, 0.01).unwrap();
        let b = Normal::new(1.0, 0.01).unwrap();
        (0..n)
            .map(|i| if i % 2 == 0 { a.sample(&mut r) } else { b.sample(&mut r) })
            .collect()
    }

    #[test]
    fn recovers_separated_mixture() {
        let p = fit_gmm2(&mixture(2000, 1), 200, 1e-9).unwrap();
        let (lo, hi) = if p.means[0] < p.means[1] { (0, 1) } else { (1, 0) };
        assert!((p.means[lo] + 1.0).abs() < 0.05);
        assert!((p.means[hi] - 1.0).abs() < 0.05);
        assert!((p.weights[0] - 0.5).abs() < 0.05);
        assert!((p.weights[0] + p.weights[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_samples_collapse_to_floor() {
        let p = fit_gmm2(&[0.7; 50], 100, 1e-9).unwrap();
        for k in 0..2 {
            assert_eq!(p.means[k], 0.7);
            assert_eq!(p.stds[k], SIGMA_FLOOR);
        }
    }

    #[test]
    fn order_independent() {
        let xs = mixture(500, 2);
        let mut ys = xs.clone();
        ys.shuffle(&mut ChaCha20Rng::seed_from_u64(3));
        assert_eq!(fit_gmm2(&xs, 100, 1e-9).unwrap(), fit_gmm2(&ys, 100, 1e-9).unwrap());
    }

    #[test]
    fn input_errors() {
        assert!(matches!(fit_gmm2(&[1.0; 7], 10, 1e-6), Err(PredicateError::TooFewSamples { .. })));
        let mut xs = vec![1.0; 10];
        xs[3] = f64::NAN;
        assert!(matches!(fit_gmm2(&xs, 10, 1e-6), Err(PredicateError::NonFinite)));
    }
}
