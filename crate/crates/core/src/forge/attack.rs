//! History-forging attacks against the predicate suite.
//!
//! * RCA fine-tunes the victim's final weights towards a random
//!   initialization under growing label poisoning, then reverses the path.
//! * CFA interpolates between a fresh random initialization and the victim's
//!   final weights.
//! * MDA distills the victim into a fresh student of the same architecture.

use super::data::SyntheticDataset;
use super::init::{init_weights, InitSpec};
use super::mlp::predict_probs;
use super::rng;
use super::train::{check_compatible, run_epoch, CrossEntropy, ForgeError, Objective, Reduction, TrainConfig};
use crate::checkpoint::{Architecture, CheckpointSequence, Layer, WeightCheckpoint};
use rand::seq::index::sample;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackFamily {
    Rca,
    Cfa,
    Mda,
}

impl AttackFamily {
    pub const ALL: [AttackFamily; 3] = [AttackFamily::Rca, AttackFamily::Cfa, AttackFamily::Mda];
}

impl fmt::Display for AttackFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackFamily::Rca => "rca",
            AttackFamily::Cfa => "cfa",
            AttackFamily::Mda => "mda",
        })
    }
}

impl FromStr for AttackFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rca" => Ok(AttackFamily::Rca),
            "cfa" => Ok(AttackFamily::Cfa),
            "mda" => Ok(AttackFamily::Mda),
            other => Err(format!("unknown attack family `{other}` (expected rca, cfa or mda)")),
        }
    }
}

/// How the RCA label-poisoning rate grows over the fine-tuning epochs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PoisonSchedule {
    /// `rate_e = poison_rate · e / P`
    #[default]
    Linear,
    Constant,
}

impl PoisonSchedule {
    pub fn rate(&self, max: f64, epoch: usize, epochs: usize) -> f64 {
        match self {
            PoisonSchedule::Linear => max * epoch as f64 / epochs.max(1) as f64,
            PoisonSchedule::Constant => max,
        }
    }
}

/// Loss reduction used by the distillation student.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MdaLoss {
    /// Summed over the minibatch, matching the attack's loss as a sum over
    /// auxiliary samples.
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackConfig {
    pub family: AttackFamily,
    /// RCA pull towards the random initialization.
    pub beta: f64,
    /// RCA maximum label-poisoning rate.
    pub poison_rate: f64,
    pub schedule: PoisonSchedule,
    /// CFA per-step interpolation increment.
    pub mu: f64,
    pub lambda_kd: f64,
    pub lambda_ce: f64,
    pub mda_loss: MdaLoss,
    /// Auxiliary data size relative to the victim's training set.
    pub aux_fraction: f64,
    /// Fraction of the auxiliary set that carries labels.
    pub labeled_fraction: f64,
}

impl AttackConfig {
    /// β = μ = 0.05, MDA cross-entropy coefficient 0.005, |D_A| = 0.2·|D_P|
    /// with half of it labeled.
    pub fn new(family: AttackFamily) -> Self {
        Self {
            family,
            beta: 0.05,
            poison_rate: 0.5,
            schedule: PoisonSchedule::Linear,
            mu: 0.05,
            lambda_kd: 1.0,
            lambda_ce: 0.005,
            mda_loss: MdaLoss::Sum,
            aux_fraction: 0.2,
            labeled_fraction: 0.5,
        }
    }

    pub fn validate(&self, epochs: usize) -> Result<(), ForgeError> {
        let bad = |m: String| Err(ForgeError::Config(m));
        if !(0.0..=1.0).contains(&self.poison_rate) {
            return bad(format!("poison_rate {} outside [0,1]", self.poison_rate));
        }
        if !(self.aux_fraction > 0.0 && self.aux_fraction <= 1.0)
            || !(0.0..=1.0).contains(&self.labeled_fraction)
        {
            return bad("aux_fraction must be in (0,1] and labeled_fraction in [0,1]".into());
        }
        match self.family {
            AttackFamily::Cfa if !(self.mu > 0.0) || self.mu * epochs as f64 + 1e-12 < 1.0 => {
                bad(format!("CFA needs mu·P >= 1 (mu = {}, P = {epochs})", self.mu))
            }
            AttackFamily::Rca if !(self.beta >= 0.0) => bad("beta must be >= 0".into()),
            AttackFamily::Mda if self.lambda_kd < 0.0 || self.lambda_ce < 0.0 => {
                bad("lambda_kd and lambda_ce must be >= 0".into())
            }
            _ => Ok(()),
        }
    }
}

/// `W̃_i = (1 − μ_i)·W̃_0 + μ_i·w_final` with `μ_i = min(1, i·μ)`.
pub fn attack_cfa(
    w_final: &WeightCheckpoint,
    arch: &Architecture,
    spec: &InitSpec,
    mu: f64,
    epochs: usize,
    seed: u64,
) -> Result<CheckpointSequence, ForgeError> {
    if !(mu > 0.0) || mu * epochs as f64 + 1e-12 < 1.0 {
        return Err(ForgeError::Config(format!("CFA needs mu·P >= 1 (mu = {mu}, P = {epochs})")));
    }
    let start = init_weights(arch, spec, seed).flatten();
    let end = w_final.flatten();
    let mut out = Vec::with_capacity(epochs + 1);
    for i in 0..=epochs {
        let t = (i as f64 * mu).min(1.0);
        let c = if i == epochs || t >= 1.0 {
            WeightCheckpoint::from_flat(arch, i, &end)?
        } else {
            let flat: Vec<f64> = start
                .iter()
                .zip(&end)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            WeightCheckpoint::from_flat(arch, i, &flat)?
        };
        out.push(c);
    }
    Ok(CheckpointSequence::new(arch.clone(), out)?)
}

struct Regularized<'a> {
    ce: CrossEntropy<'a>,
    beta: f64,
    anchor: &'a WeightCheckpoint,
}

impl Objective for Regularized<'_> {
    fn sample(&self, i: usize, probs: &[f64], out: &mut [f64]) -> f64 {
        self.ce.sample(i, probs, out)
    }

    fn regularize(&self, w: &WeightCheckpoint, grads: &mut [Layer]) {
        if self.beta == 0.0 {
            return;
        }
        // ∇ DL(W, A) = (W − A) / (total_w · ‖W − A‖)
        let norm: f64 = w
            .flatten()
            .iter()
            .zip(self.anchor.flatten())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            return;
        }
        let k = self.beta / (w.total_w() as f64 * norm);
        for ((g, l), a) in grads.iter_mut().zip(&w.layers).zip(&self.anchor.layers) {
            for ((gv, wv), av) in g.weights.iter_mut().zip(&l.weights).zip(&a.weights) {
                *gv += k * (wv - av);
            }
            for ((gv, wv), av) in g.bias.iter_mut().zip(&l.bias).zip(&a.bias) {
                *gv += k * (wv - av);
            }
        }
    }
}

fn poison<R: Rng>(labels: &[usize], classes: usize, rate: f64, r: &mut R) -> Vec<usize> {
    let mut out = labels.to_vec();
    let k = (rate * labels.len() as f64).floor() as usize;
    for i in sample(r, labels.len(), k.min(labels.len())) {
        out[i] = (out[i] + 1 + r.gen_range(0..classes - 1)) % classes;
    }
    out
}

/// Fine-tunes away from `w_final` for `cfg.epochs` epochs and returns the
/// trajectory reversed, so the forged chain ends at `w_final`.
pub fn attack_rca(
    w_final: &WeightCheckpoint,
    arch: &Architecture,
    data_aux: &SyntheticDataset,
    cfg: &TrainConfig,
    beta: f64,
    poison_rate: f64,
    schedule: PoisonSchedule,
    spec: &InitSpec,
    seed: u64,
) -> Result<CheckpointSequence, ForgeError> {
    cfg.validate()?;
    check_compatible(arch, data_aux)?;
    let anchor = init_weights(arch, spec, seed);
    let mut r = rng(seed ^ 0x7263_615f_7472_6169);
    let mut w = w_final.clone();
    w.epoch = 0;
    let mut path = vec![w.clone()];
    for epoch in 1..=cfg.epochs {
        let rate = schedule.rate(poison_rate, epoch, cfg.epochs);
        let labels = poison(&data_aux.labels, data_aux.classes, rate, &mut r);
        let obj = Regularized {
            ce: CrossEntropy { labels: &labels },
            beta,
            anchor: &anchor,
        };
        run_epoch(&mut w, data_aux, &obj, cfg.learning_rate, cfg.batch_size, &mut r, epoch)?;
        path.push(w.clone());
    }
    path.reverse();
    for (i, c) in path.iter_mut().enumerate() {
        c.epoch = i;
    }
    let last = path.len() - 1;
    path[last] = WeightCheckpoint {
        epoch: last,
        ..w_final.clone()
    };
    Ok(CheckpointSequence::new(arch.clone(), path)?)
}

struct Distill<'a> {
    teacher: Vec<Vec<f64>>,
    labels: &'a [usize],
    labeled: &'a [bool],
    lambda_kd: f64,
    lambda_ce: f64,
    reduction: Reduction,
}

impl Objective for Distill<'_> {
    fn sample(&self, i: usize, probs: &[f64], out: &mut [f64]) -> f64 {
        let t = &self.teacher[i];
        let mut loss = 0.0;
        for k in 0..out.len() {
            out[k] = self.lambda_kd * (probs[k] - t[k]);
            if t[k] > 0.0 {
                loss += self.lambda_kd * t[k] * (t[k].ln() - probs[k].max(1e-300).ln());
            }
        }
        if self.labeled[i] {
            let y = self.labels[i];
            for (k, o) in out.iter_mut().enumerate() {
                *o += self.lambda_ce * (probs[k] - f64::from(u8::from(k == y)));
            }
            loss -= self.lambda_ce * probs[y].max(1e-300).ln();
        }
        loss
    }

    fn reduction(&self) -> Reduction {
        self.reduction
    }
}

/// Trains a fresh student on `data_aux` to match the victim's softmax
/// outputs (KL) plus cross-entropy on the labeled samples.
#[allow(clippy::too_many_arguments)]
pub fn attack_mda(
    w_final: &WeightCheckpoint,
    arch: &Architecture,
    data_aux: &SyntheticDataset,
    labeled_mask: &[bool],
    lambda_kd: f64,
    lambda_ce: f64,
    loss: MdaLoss,
    cfg: &TrainConfig,
    spec: &InitSpec,
    seed: u64,
) -> Result<CheckpointSequence, ForgeError> {
    cfg.validate()?;
    check_compatible(arch, data_aux)?;
    if labeled_mask.len() != data_aux.len() {
        return Err(ForgeError::Config("labeled mask length differs from aux set".into()));
    }
    if labeled_mask.iter().all(|&b| b) && lambda_kd > 0.0 {
        return Err(ForgeError::Config(
            "labeled subset must be strictly smaller than the auxiliary set".into(),
        ));
    }
    let teacher = (0..data_aux.len())
        .map(|i| predict_probs(w_final, data_aux.row(i)))
        .collect();
    let obj = Distill {
        teacher,
        labels: &data_aux.labels,
        labeled: labeled_mask,
        lambda_kd,
        lambda_ce,
        reduction: match loss {
            MdaLoss::Sum => Reduction::Sum,
            MdaLoss::Mean => Reduction::Mean,
        },
    };
    let mut w = init_weights(arch, spec, seed);
    let mut r = rng(seed ^ 0x6d64_615f_7472_6169);
    let mut out = vec![w.clone()];
    for epoch in 1..=cfg.epochs {
        run_epoch(&mut w, data_aux, &obj, cfg.learning_rate, cfg.batch_size, &mut r, epoch)?;
        w.epoch = epoch;
        out.push(w.clone());
    }
    Ok(CheckpointSequence::new(arch.clone(), out)?)
}

/// Runs one attack family against a victim sequence. The adversary holds an
/// auxiliary subset of the victim's data of relative size `aux_fraction`, of
/// which `labeled_fraction` is labeled, and forges a chain of the victim's
/// length.
pub fn forge_attack(
    victim: &CheckpointSequence,
    victim_data: &SyntheticDataset,
    attack: &AttackConfig,
    cfg: &TrainConfig,
    spec: &InitSpec,
    seed: u64,
) -> Result<CheckpointSequence, ForgeError> {
    let epochs = victim.epochs();
    attack.validate(epochs)?;
    let arch = victim.arch();
    let w_final = victim.last();
    let mut r = rng(seed ^ 0x6175_785f_7370_6c74);
    let n_aux = ((attack.aux_fraction * victim_data.len() as f64).round() as usize).max(2);
    let mut aux_idx = sample(&mut r, victim_data.len(), n_aux.min(victim_data.len())).into_vec();
    aux_idx.sort_unstable();
    let aux = victim_data.subset(&aux_idx);
    let n_lab = (attack.labeled_fraction * aux.len() as f64).round() as usize;
    let mut labeled = vec![false; aux.len()];
    for i in sample(&mut r, aux.len(), n_lab.min(aux.len())) {
        labeled[i] = true;
    }
    let attack_cfg = TrainConfig {
        epochs,
        ..cfg.clone()
    };
    match attack.family {
        AttackFamily::Cfa => attack_cfa(w_final, arch, spec, attack.mu, epochs, seed),
        AttackFamily::Rca => {
            let idx: Vec<usize> = (0..aux.len()).filter(|&i| labeled[i]).collect();
            let lab = if idx.is_empty() { aux.clone() } else { aux.subset(&idx) };
            attack_rca(
                w_final,
                arch,
                &lab,
                &attack_cfg,
                attack.beta,
                attack.poison_rate,
                attack.schedule,
                spec,
                seed,
            )
        }
        AttackFamily::Mda => attack_mda(
            w_final,
            arch,
            &aux,
            &labeled,
            attack.lambda_kd,
            attack.lambda_ce,
            attack.mda_loss,
            &attack_cfg,
            spec,
            seed,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{accuracy, gen_synthetic_dataset, train_sequence};

    fn victim() -> (Architecture, SyntheticDataset, CheckpointSequence) {
        let arch = Architecture::mlp(&[4, 16, 2]).unwrap();
        let data = gen_synthetic_dataset(1000, 4, 2, 21);
        let seq = train_sequence(&arch, &data, &TrainConfig::default(), &InitSpec::default(), 5).unwrap();
        (arch, data, seq)
    }

    #[test]
    fn cfa_hand_interpolation() {
        let arch = Architecture::mlp(&[2, 2]).unwrap();
        let ones = WeightCheckpoint::from_flat(&arch, 0, &[1.0; 6]).unwrap();
        // σ → 0 init around zero stands in for the all-zero start.
        let zero = InitSpec::Gaussian { mean: 0.0, std: 1e-300 };
        let seq = attack_cfa(&ones, &arch, &zero, 0.05, 20, 1).unwrap();
        assert_eq!(seq.checkpoints().len(), 21);
        for v in seq.checkpoints()[10].flatten() {
            assert!((v - 0.5).abs() < 1e-12);
        }
        assert_eq!(seq.last().flatten(), ones.flatten());
        // clamp: P larger than 1/μ
        let seq = attack_cfa(&ones, &arch, &zero, 0.05, 25, 1).unwrap();
        for c in &seq.checkpoints()[20..] {
            assert_eq!(c.flatten(), ones.flatten());
        }
        assert!(attack_cfa(&ones, &arch, &zero, 0.05, 10, 1).is_err());
    }

    #[test]
    fn cfa_ends_bit_exact() {
        let (arch, _, seq) = victim();
        let forged = attack_cfa(seq.last(), &arch, &InitSpec::default(), 0.05, 20, 3).unwrap();
        assert_eq!(forged.last().flatten(), seq.last().flatten());
    }

    #[test]
    fn rca_degenerate_is_reversed_finetune() {
        let (arch, data, seq) = victim();
        let aux = data.subset(&(0..200).collect::<Vec<_>>());
        let cfg = TrainConfig { epochs: 5, ..TrainConfig::default() };
        let forged = attack_rca(seq.last(), &arch, &aux, &cfg, 0.0, 0.0, PoisonSchedule::Linear, &InitSpec::default(), 4).unwrap();
        assert_eq!(forged.checkpoints().len(), 6);
        assert_eq!(forged.last().flatten(), seq.last().flatten());
        // plain fine-tuning keeps the model accurate at the forged start
        assert!(accuracy(forged.initial(), &data) > 0.9);
    }

    #[test]
    fn mda_degenerate_is_ordinary_training() {
        let (arch, data, seq) = victim();
        let aux = data.subset(&(0..300).collect::<Vec<_>>());
        let all = vec![true; aux.len()];
        let cfg = TrainConfig { epochs: 10, ..TrainConfig::default() };
        let student = attack_mda(seq.last(), &arch, &aux, &all, 0.0, 1.0, MdaLoss::Mean, &cfg, &InitSpec::default(), 8).unwrap();
        assert!(accuracy(student.last(), &data) > 0.9);
        // a fully labeled set is not a distillation attack
        assert!(attack_mda(seq.last(), &arch, &aux, &all, 1.0, 0.005, MdaLoss::Sum, &cfg, &InitSpec::default(), 8).is_err());
    }

    #[test]
    fn forge_is_deterministic() {
        let (_, data, seq) = victim();
        for fam in AttackFamily::ALL {
            let cfg = AttackConfig::new(fam);
            let a = forge_attack(&seq, &data, &cfg, &TrainConfig::default(), &InitSpec::default(), 9).unwrap();
            let b = forge_attack(&seq, &data, &cfg, &TrainConfig::default(), &InitSpec::default(), 9).unwrap();
            assert_eq!(crate::encode_sequence(&a), crate::encode_sequence(&b), "{fam}");
            assert_eq!(a.checkpoints().len(), seq.checkpoints().len());
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("CFA".parse::<AttackFamily>(), Ok(AttackFamily::Cfa));
        assert!("xyz".parse::<AttackFamily>().is_err());
    }
}
