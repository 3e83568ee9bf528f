use super::config::{GmmReference, PredicateConfig};
use super::emd::emd_1d;
use super::gmm::{fit_gmm2, MIN_SAMPLES};
use super::pca::pca_max_ratio;
use super::PredicateError;
use crate::checkpoint::{dl_distance, CheckpointError, CheckpointSequence, WeightCheckpoint};
use crate::forge::init_weights;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CwcdOutcome {
    pub value: f64,
    pub dis_mean: f64,
    pub dis_std: f64,
    pub pass: bool,
    /// DisStd was zero; the pass bit fell back to `value < dis_mean`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IwfwOutcome {
    /// Largest per-layer EMD between the weights and their fitted mixture.
    pub emd_max: f64,
    /// Largest per-layer first-component variance share.
    pub pca_max: f64,
    pub emd_pass: bool,
    pub pca_pass: bool,
    pub pass: bool,
    /// Layers with fewer than 8 weights, left out of both statistics.
    pub excluded_layers: Vec<usize>,
    /// Layers left out of the PCA statistic only (fewer than two columns, or
    /// no more rows than columns, where the sample covariance is rank
    /// deficient).
    pub pca_skipped_layers: Vec<usize>,
    pub pca_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwcdOutcome {
    /// Largest adjacent projection distance over all epochs and layers.
    pub value: f64,
    /// `(epoch i, layer t)` where the maximum occurs.
    pub argmax: (usize, usize),
    pub pass: bool,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    // Sorting first makes the statistics independent of sampling order.
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let shift = v[0];
    let mean = v.iter().map(|x| x - shift).sum::<f64>() / n;
    let var = v.iter().map(|x| (x - shift - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (shift + mean, var.sqrt())
}

/// Distances from `k_random_inits` fresh initializations to `W_P`.
pub(crate) fn reference_distances(
    seq: &CheckpointSequence,
    cfg: &PredicateConfig,
    seed: u64,
) -> Result<Vec<f64>, CheckpointError> {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    (0..cfg.k_random_inits)
        .map(|_| {
            let w = init_weights(seq.arch(), &cfg.init_spec, r.next_u64());
            dl_distance(&w, seq.last())
        })
        .collect()
}

pub fn eval_cwcd(seq: &CheckpointSequence, cfg: &PredicateConfig, seed: u64) -> Result<CwcdOutcome, PredicateError> {
    let value = dl_distance(seq.initial(), seq.last())?;
    let refs = reference_distances(seq, cfg, seed)?;
    let (dis_mean, dis_std) = mean_std(&refs);
    let degenerate = dis_std == 0.0;
    let pass = if degenerate {
        value < dis_mean
    } else {
        value <= dis_mean - cfg.epsilon * dis_std
    };
    Ok(CwcdOutcome {
        value,
        dis_mean,
        dis_std,
        pass,
        degenerate,
    })
}

pub fn eval_iwfw(w0: &WeightCheckpoint, cfg: &PredicateConfig) -> Result<IwfwOutcome, PredicateError> {
    let mut out = IwfwOutcome {
        emd_max: 0.0,
        pca_max: 0.0,
        emd_pass: true,
        pca_pass: true,
        pass: true,
        excluded_layers: Vec::new(),
        pca_skipped_layers: Vec::new(),
        pca_degenerate: false,
    };
    let mut draw_rng = ChaCha20Rng::seed_from_u64(cfg.emd_seed);
    for (t, layer) in w0.layers.iter().enumerate() {
        if layer.weights.len() < MIN_SAMPLES {
            out.excluded_layers.push(t);
            continue;
        }
        let n_draws = layer.weights.len() * cfg.emd_oversample;
        let draws: Vec<f64> = match cfg.gmm_reference {
            GmmReference::Prescribed => (0..n_draws).map(|_| cfg.init_spec.sample(&mut draw_rng)).collect(),
            GmmReference::Fitted => {
                let gmm = fit_gmm2(&layer.weights, cfg.gmm_max_iters, cfg.gmm_tol)?;
                (0..n_draws).map(|_| gmm.sample(&mut draw_rng)).collect()
            }
        };
        out.emd_max = out.emd_max.max(emd_1d(&layer.weights, &draws));

        if layer.cols < 2 || layer.rows <= layer.cols {
            out.pca_skipped_layers.push(t);
            continue;
        }
        let stat = pca_max_ratio(&layer.weights, layer.rows, layer.cols)?;
        out.pca_degenerate |= stat.degenerate;
        out.pca_max = out.pca_max.max(stat.ratio);
    }
    out.emd_pass = out.emd_max <= cfg.emd_threshold;
    out.pca_pass = out.pca_max <= cfg.pca_threshold;
    out.pass = out.emd_pass && out.pca_pass;
    Ok(out)
}

/// `sqrt((b̄_i − b̄_{i−1})² + (‖W_i‖² − ‖W_{i−1}‖²)²)` for one layer, where `b̄`
/// is the layer's mean bias.
pub(crate) fn projection_distance(prev: &crate::checkpoint::Layer, cur: &crate::checkpoint::Layer) -> f64 {
    let db = cur.mean_bias() - prev.mean_bias();
    let dn = cur.weight_norm_sq() - prev.weight_norm_sq();
    (db * db + dn * dn).sqrt()
}

fn max_adjacent_dp(seq: &CheckpointSequence) -> (f64, (usize, usize)) {
    let mut best = (0.0, (1, 0));
    for (i, pair) in seq.checkpoints().windows(2).enumerate() {
        for (t, (a, b)) in pair[0].layers.iter().zip(&pair[1].layers).enumerate() {
            let dp = projection_distance(a, b);
            if dp > best.0 {
                best = (dp, (i + 1, t));
            }
        }
    }
    best
}

pub fn eval_mwcd(seq: &CheckpointSequence, cfg: &PredicateConfig) -> Result<MwcdOutcome, PredicateError> {
    let (value, argmax) = max_adjacent_dp(seq);
    Ok(MwcdOutcome {
        value,
        argmax,
        pass: value < cfg.delta,
    })
}

/// δ as three times the largest adjacent projection distance seen across
/// clean runs.
pub fn calibrate_delta(clean_runs: &[CheckpointSequence]) -> f64 {
    3.0 * clean_runs
        .iter()
        .map(|s| max_adjacent_dp(s).0)
        .fold(0.0, f64::max)
}
