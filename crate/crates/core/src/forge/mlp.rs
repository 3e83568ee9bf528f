//! Forward and backward passes of a tanh MLP with a softmax head.

use super::data::SyntheticDataset;
use crate::checkpoint::{Layer, WeightCheckpoint};

/// Activations per layer boundary: `acts[0]` is the input, `acts[t + 1]` the
/// output of layer `t` (tanh for hidden layers, raw logits for the last).
pub(crate) fn forward(w: &WeightCheckpoint, x: &[f64]) -> Vec<Vec<f64>> {
    let mut acts = Vec::with_capacity(w.layers.len() + 1);
    acts.push(x.to_vec());
    let last = w.layers.len() - 1;
    for (t, l) in w.layers.iter().enumerate() {
        let input = &acts[t];
        let mut out: Vec<f64> = (0..l.rows)
            .map(|r| {
                let row = &l.weights[r * l.cols..(r + 1) * l.cols];
                row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + l.bias[r]
            })
            .collect();
        if t != last {
            out.iter_mut().for_each(|v| *v = v.tanh());
        }
        acts.push(out);
    }
    acts
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn predict_probs(w: &WeightCheckpoint, x: &[f64]) -> Vec<f64> {
    let acts = forward(w, x);
    softmax(&acts[acts.len() - 1])
}

/// Accumulates `scale · ∂/∂θ` into `grads`, given the gradient of the loss
/// with respect to the logits.
pub(crate) fn backward(
    w: &WeightCheckpoint,
    acts: &[Vec<f64>],
    dlogits: &[f64],
    grads: &mut [Layer],
    scale: f64,
) {
    let mut delta = dlogits.to_vec();
    for t in (0..w.layers.len()).rev() {
        let l = &w.layers[t];
        let g = &mut grads[t];
        let input = &acts[t];
        for r in 0..l.rows {
            let d = scale * delta[r];
            g.bias[r] += d;
            let row = &mut g.weights[r * l.cols..(r + 1) * l.cols];
            for (gw, a) in row.iter_mut().zip(input) {
                *gw += d * a;
            }
        }
        if t > 0 {
            delta = (0..l.cols)
                .map(|c| {
                    let s: f64 = (0..l.rows).map(|r| l.weights[r * l.cols + c] * delta[r]).sum();
                    s * (1.0 - input[c] * input[c])
                })
                .collect();
        }
    }
}

pub fn accuracy(w: &WeightCheckpoint, data: &SyntheticDataset) -> f64 {
    let hits = (0..data.len())
        .filter(|&i| {
            let p = predict_probs(w, data.row(i));
            let arg = p
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(k, _)| k)
                .unwrap();
            arg == data.labels[i]
        })
        .count();
    hits as f64 / data.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkpoint::Architecture;
    use crate::forge::{init_weights, InitSpec};

    fn ce(w: &WeightCheckpoint, x: &[f64], y: usize) -> f64 {
        -predict_probs(w, x)[y].ln()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let arch = Architecture::mlp(&[3, 5, 4, 3]).unwrap();
        let w = init_weights(&arch, &InitSpec::default(), 3);
        let x = [0.4, -1.1, 0.7];
        let y = 2;
        let acts = forward(&w, &x);
        let mut p = softmax(&acts[acts.len() - 1]);
        p[y] -= 1.0;
        let mut grads: Vec<Layer> = arch.layers().iter().copied().map(Layer::zeros).collect();
        backward(&w, &acts, &p, &mut grads, 1.0);

        let flat = w.flatten();
        let analytic: Vec<f64> = grads
            .iter()
            .flat_map(|g| g.weights.iter().chain(&g.bias).copied().collect::<Vec<_>>())
            .collect();
        let h = 1e-6;
        for k in 0..flat.len() {
            let mut up = flat.clone();
            up[k] += h;
            let mut dn = flat.clone();
            dn[k] -= h;
            let wu = WeightCheckpoint::from_flat(&arch, 0, &up).unwrap();
            let wd = WeightCheckpoint::from_flat(&arch, 0, &dn).unwrap();
            let fd = (ce(&wu, &x, y) - ce(&wd, &x, y)) / (2.0 * h);
            assert!((fd - analytic[k]).abs() < 1e-6, "param {k}: fd {fd} vs {}", analytic[k]);
        }
    }

    #[test]
    fn softmax_is_a_distribution() {
        let p = softmax(&[1000.0, 0.0, -5.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|v| v.is_finite()));
    }
}
