//! Prover/verifier cost as a function of the number of identity records.
//!
//! One clean toy run with `max(num_irs) - 1` epochs is trained once; each
//! `Num` audits its first `Num` checkpoints. Trials are interleaved across
//! `Num` so slow drift in machine load hits every column alike. Each trial
//! keeps, per column, the fastest of `reps` runs (load only ever adds time)
//! and rows report the median over trials. Proving and verification are
//! timed in separate phases.

use didm_core::forge::toy_run;
use didm_core::predicate::PredicateConfig;
use didm_crypto::{AccumulatorProof, AccumulatorValue, HashVariant, OpCounter};
use didm_protocol::{addr_gen, audit, build_transaction, didm_gen_with, key_gen, verify_tx, ProtocolError, PublicParams};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub num_irs: Vec<usize>,
    pub trials: usize,
    /// Repeats per column per trial; a trial's sample is their minimum.
    pub reps: usize,
    pub seed: u64,
    pub owner: u64,
    pub scale_bits: u32,
    pub compare_hash: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub num: usize,
    /// `inner_prove + outer_prove`, one sample per trial.
    pub prove: Vec<Duration>,
    pub verify: Vec<Duration>,
    pub tx_bytes: usize,
    pub pi_out_bytes: usize,
    pub accu_bytes: usize,
    pub pi_acs_bytes: usize,
    pub prove_ops: OpCounter,
    pub verify_ops: OpCounter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HashComparison {
    pub num: usize,
    pub sponge: Duration,
    pub pedersen: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub hash: Option<HashComparison>,
}

pub fn median(xs: &[Duration]) -> Duration {
    let mut v = xs.to_vec();
    v.sort();
    match v.len() {
        0 => Duration::ZERO,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2,
    }
}

impl BenchRow {
    pub fn prove_median(&self) -> Duration {
        median(&self.prove)
    }

    pub fn verify_median(&self) -> Duration {
        median(&self.verify)
    }
}

impl BenchReport {
    /// Median prove time strictly increasing along `num_irs` order.
    pub fn prove_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].prove_median() < w[1].prove_median())
    }

    /// max/min of the median verify times.
    pub fn verify_ratio(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().map(|r| r.verify_median().as_secs_f64()).collect();
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }

    pub fn accu_size_constant(&self) -> bool {
        self.rows.iter().all(|r| r.accu_bytes == AccumulatorValue::ENCODED_LEN)
    }

    pub fn verify_pairings_constant(&self) -> bool {
        self.rows.iter().all(|r| r.verify_ops.pairing_checks == 1)
    }

    pub fn passed(&self) -> bool {
        self.prove_monotone()
            && self.verify_ratio() < 2.0
            && self.accu_size_constant()
            && self.verify_pairings_constant()
            && self.hash.as_ref().map_or(true, |h| h.sponge < h.pedersen)
    }

    pub fn to_text(&self) -> String {
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
        let mut s = String::new();
        for r in &self.rows {
            let n = r.num;
            let _ = writeln!(s, "num{n}.prove_ms = {}", ms(r.prove_median()));
            let _ = writeln!(s, "num{n}.verify_ms = {}", ms(r.verify_median()));
            let _ = writeln!(s, "num{n}.tx_bytes = {}", r.tx_bytes);
            let _ = writeln!(s, "num{n}.pi_out_bytes = {}", r.pi_out_bytes);
            let _ = writeln!(s, "num{n}.accu_bytes = {}", r.accu_bytes);
            let _ = writeln!(s, "num{n}.pi_acs_bytes = {}", r.pi_acs_bytes);
            for (side, o) in [("prove", &r.prove_ops), ("verify", &r.verify_ops)] {
                let _ = writeln!(
                    s,
                    "num{n}.{side}_ops = pairings:{} checks:{} g1_muls:{} g1_adds:{} hashes:{}",
                    o.pairings, o.pairing_checks, o.g1_muls, o.g1_adds, o.hashes
                );
            }
        }
        let _ = writeln!(s, "prove_monotone = {}", self.prove_monotone());
        let _ = writeln!(s, "verify_ratio = {:.3}", self.verify_ratio());
        let _ = writeln!(s, "verify_bounded = {}", self.verify_ratio() < 2.0);
        let _ = writeln!(s, "accu_size_constant = {}", self.accu_size_constant());
        let _ = writeln!(s, "verify_single_pairing_check = {}", self.verify_pairings_constant());
        if let Some(h) = &self.hash {
            let _ = writeln!(s, "hash.num = {}", h.num);
            let _ = writeln!(s, "hash.{}_audit_ms = {}", HashVariant::Sponge, ms(h.sponge));
            let _ = writeln!(s, "hash.{}_audit_ms = {}", HashVariant::Pedersen, ms(h.pedersen));
            let _ = writeln!(s, "hash.sponge_faster = {}", h.sponge < h.pedersen);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("num,prove_ms,verify_ms,tx_bytes,pi_out_bytes,accu_bytes,pi_acs_bytes,prove_g1_muls,verify_g1_muls,verify_pairing_checks\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.3},{:.3},{},{},{},{},{},{},{}",
                r.num,
                r.prove_median().as_secs_f64() * 1e3,
                r.verify_median().as_secs_f64() * 1e3,
                r.tx_bytes,
                r.pi_out_bytes,
                r.accu_bytes,
                r.pi_acs_bytes,
                r.prove_ops.g1_muls,
                r.verify_ops.g1_muls,
                r.verify_ops.pairing_checks
            );
        }
        s
    }
}

pub fn run_bench(pp: &PublicParams, cfg: &BenchConfig, pred: &PredicateConfig) -> Result<BenchReport, ProtocolError> {
    if cfg.num_irs.is_empty() || cfg.num_irs.iter().any(|&n| n < 2) || cfg.trials == 0 {
        return Err(ProtocolError::Params("need at least one Num >= 2 and trials >= 1".into()));
    }
    let max = *cfg.num_irs.iter().max().unwrap();
    let (_, full) = toy_run(cfg.seed, max - 1).map_err(|e| ProtocolError::Params(e.to_string()))?;
    let keys = key_gen(pp);
    let addr = addr_gen(pp, cfg.owner)?;
    let seqs = cfg
        .num_irs
        .iter()
        .map(|&n| full.prefix(n))
        .collect::<Result<Vec<_>, _>>()?;

    // Untimed pass so page faults and allocator growth land outside the samples.
    audit(pp, &keys, &addr, &seqs[seqs.len() - 1], pred, cfg.scale_bits)?;
    let mut rows: Vec<BenchRow> = Vec::with_capacity(seqs.len());
    let mut txs = Vec::with_capacity(seqs.len());
    for (i, seq) in seqs.iter().enumerate() {
        let run = audit(pp, &keys, &addr, seq, pred, cfg.scale_bits)?;
        let tx = build_transaction(pp, &keys.vk, &run.outer, &[])?;
        let mut prove_ops = run.inner_ops;
        prove_ops.absorb(&run.outer_ops);
        rows.push(BenchRow {
            num: cfg.num_irs[i],
            prove: Vec::with_capacity(cfg.trials),
            verify: Vec::new(),
            tx_bytes: tx.to_bytes().len(),
            pi_out_bytes: run.outer.pi_out.to_bytes().len(),
            accu_bytes: run.outer.accu.to_bytes().len(),
            pi_acs_bytes: run.outer.pi_acs.to_bytes().len(),
            prove_ops,
            verify_ops: OpCounter::new(),
        });
        txs.push(tx);
    }
    // Repeats cycle through every column, starting at a different one each
    // trial, so a slow stretch of the machine is spread across all Num.
    let k = seqs.len();
    for trial in 0..cfg.trials {
        let mut best = vec![Duration::MAX; k];
        for _ in 0..cfg.reps.max(1) {
            for j in 0..k {
                let i = (trial + j) % k;
                let run = audit(pp, &keys, &addr, &seqs[i], pred, cfg.scale_bits)?;
                best[i] = best[i].min(run.inner_time + run.outer_time);
            }
        }
        for (row, b) in rows.iter_mut().zip(best) {
            row.prove.push(b);
        }
    }
    // Verification is timed in its own phase so it does not inherit cache
    // and allocator state from the prover.
    for _ in 0..cfg.trials {
        let mut best = vec![Duration::MAX; k];
        for _ in 0..cfg.reps.max(1) {
            for (i, (row, tx)) in rows.iter_mut().zip(&txs).enumerate() {
                let mut ops = OpCounter::new();
                let t0 = Instant::now();
                let ok = verify_tx(pp, &keys.vk, tx, &[], &mut ops)?;
                best[i] = best[i].min(t0.elapsed());
                if !ok {
                    return Err(ProtocolError::InvalidTransaction(format!("Num = {} did not verify", row.num)));
                }
                row.verify_ops = ops;
            }
        }
        for (row, b) in rows.iter_mut().zip(best) {
            row.verify.push(b);
        }
    }
    debug_assert!(rows.iter().all(|r| r.pi_acs_bytes == AccumulatorProof::ENCODED_LEN));

    let hash = if cfg.compare_hash {
        Some(compare_hash(pp, &seqs[seqs.len() - 1], max, cfg, pred)?)
    } else {
        None
    };
    Ok(BenchReport { rows, hash })
}

/// Full `audit` (records, inner and outer proof) under both hash variants
/// on the same sequence, owner and master seed.
fn compare_hash(
    pp: &PublicParams,
    seq: &didm_core::CheckpointSequence,
    num: usize,
    cfg: &BenchConfig,
    pred: &PredicateConfig,
) -> Result<HashComparison, ProtocolError> {
    let mut times = Vec::new();
    for variant in [HashVariant::Sponge, HashVariant::Pedersen] {
        let pv = didm_gen_with(pp.lambda, pp.master_seed, pp.max_total_w, variant)?;
        let keys = key_gen(&pv);
        let addr = addr_gen(&pv, cfg.owner)?;
        let mut samples = Vec::with_capacity(cfg.trials);
        for _ in 0..cfg.trials {
            let t0 = Instant::now();
            audit(&pv, &keys, &addr, seq, pred, cfg.scale_bits)?;
            samples.push(t0.elapsed());
        }
        times.push(median(&samples));
    }
    Ok(HashComparison {
        num,
        sponge: times[0],
        pedersen: times[1],
    })
}
