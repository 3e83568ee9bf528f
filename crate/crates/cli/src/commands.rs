use crate::args::{AcsCmd, AuditCmd, BenchArgs, Command, ForgeCmd, LedgerCmd, ProveArgs, SetupArgs};
use crate::bench::{run_bench, BenchConfig};
use crate::error::CliError;
use crate::fsio::{hex, read, read_string};
use crate::inspect::inspect;
use crate::manifest::RunManifest;
use didm_core::forge::{
    accuracy, forge_attack, toy_arch, toy_dataset, train_sequence, AttackConfig, InitSpec, TrainConfig,
};
use didm_core::predicate::{evaluate, PredicateConfig};
use didm_core::{decode_sequence, encode_sequence, DEFAULT_SCALE_BITS};
use didm_crypto::curve::g1_to_bytes;
use didm_crypto::{acs_decide, acs_keygen, OpCounter};
use didm_protocol::codec::{read_sections, TAG_OUTERPRF, TAG_TRANSACT};
use didm_protocol::keys::digest_hex;
use didm_protocol::record::encode_records;
use didm_protocol::{
    addr_gen, audit, build_transaction, didm_gen, didm_gen_with, key_gen, verify_tx, Ledger, OuterOutput,
    ProtocolError, PublicParams, Transaction, SECURITY_LEVEL,
};
use std::path::Path;
use std::time::Instant;

pub fn dispatch(cmd: &Command, m: &mut RunManifest) -> Result<(), CliError> {
    match cmd {
        Command::Setup(a) => setup(a, m),
        Command::Forge(f) => forge(f, m),
        Command::Audit(AuditCmd::Prove(a)) => prove(a, m),
        Command::Audit(AuditCmd::Verify { pp, tx, ledger }) => audit_verify(pp, tx, ledger.as_deref(), m),
        Command::Ledger(l) => ledger(l, m),
        Command::Acs(AcsCmd::Dump { file, pp }) => acs_dump(file, pp.as_deref(), m),
        Command::Inspect { file } => {
            let bytes = read(file)?;
            m.input("file", file, &bytes);
            print!("{}", inspect(&bytes)?);
            Ok(())
        }
        Command::Bench(a) => bench(a, m),
    }
}

fn load_pp(path: &Path, m: &mut RunManifest) -> Result<PublicParams, CliError> {
    let bytes = read(path)?;
    m.input("pp", path, &bytes);
    Ok(PublicParams::from_bytes(&bytes)?)
}

fn load_config(path: Option<&Path>, m: &mut RunManifest) -> Result<PredicateConfig, CliError> {
    let cfg = match path {
        Some(p) => {
            let s = read_string(p)?;
            m.input("config", p, s.as_bytes());
            PredicateConfig::from_toml_str(&s)?
        }
        None => PredicateConfig::default(),
    };
    m.config_digest("predicates", cfg.to_toml_string().as_bytes());
    Ok(cfg)
}

fn load_seq(path: &Path, m: &mut RunManifest) -> Result<didm_core::CheckpointSequence, CliError> {
    let bytes = read(path)?;
    m.input("seq", path, &bytes);
    Ok(decode_sequence(&bytes)?)
}

fn setup(a: &SetupArgs, m: &mut RunManifest) -> Result<(), CliError> {
    let max = a.max_params.unwrap_or_else(|| toy_arch().total_params());
    m.seed("master", a.seed);
    let pp = didm_gen_with(SECURITY_LEVEL, a.seed, max, a.hash)?;
    m.output("pp", &a.out, &pp.to_bytes())?;
    println!("pp: degree {} (max_params {max}), hash {}", pp.degree(), a.hash);
    if let Some(k) = &a.keys {
        m.output("keys", k, &key_gen(&pp).to_bytes())?;
    }
    Ok(())
}

fn forge(f: &ForgeCmd, m: &mut RunManifest) -> Result<(), CliError> {
    match f {
        ForgeCmd::Train {
            seed,
            epochs,
            lr,
            batch_size,
            out,
        } => {
            m.seed("train", *seed);
            let data = toy_dataset(*seed);
            let cfg = TrainConfig {
                epochs: *epochs,
                learning_rate: *lr,
                batch_size: *batch_size,
            };
            let seq = train_sequence(&toy_arch(), &data, &cfg, &InitSpec::default(), *seed)?;
            m.output("seq", out, &encode_sequence(&seq))?;
            let acc = accuracy(seq.last(), &data);
            m.set("result.accuracy", format!("{acc:.4}"));
            println!("trained {} epochs, final accuracy {acc:.4}", seq.epochs());
            Ok(())
        }
        ForgeCmd::Attack {
            family,
            victim,
            data_seed,
            seed,
            out,
            beta,
            mu,
            poison_rate,
            lambda_ce,
        } => {
            m.seed("attack", *seed);
            m.seed("data", *data_seed);
            let victim_seq = load_seq(victim, m)?;
            let mut ac = AttackConfig::new(*family);
            ac.beta = beta.unwrap_or(ac.beta);
            ac.mu = mu.unwrap_or(ac.mu);
            ac.poison_rate = poison_rate.unwrap_or(ac.poison_rate);
            ac.lambda_ce = lambda_ce.unwrap_or(ac.lambda_ce);
            m.set("attack", format!("{ac:?}"));
            let forged = forge_attack(
                &victim_seq,
                &toy_dataset(*data_seed),
                &ac,
                &TrainConfig::default(),
                &InitSpec::default(),
                *seed,
            )?;
            m.output("seq", out, &encode_sequence(&forged))?;
            println!("forged {} chain of {} checkpoints", family, forged.checkpoints().len());
            Ok(())
        }
        ForgeCmd::Eval { seq, config } => {
            let cfg = load_config(config.as_deref(), m)?;
            let s = load_seq(seq, m)?;
            let r = evaluate(&s, &cfg)?;
            print!("{}", r.to_text());
            m.set("result.all_pass", r.all_pass);
            if r.all_pass {
                Ok(())
            } else {
                Err(CliError::Rejected(ProtocolError::PredicateFailure(r.failures()).to_string()))
            }
        }
    }
}

fn prior_leaves(
    pp: &PublicParams,
    ledger: Option<&Path>,
    m: &mut RunManifest,
) -> Result<Vec<didm_crypto::Scalar>, CliError> {
    match ledger {
        None => Ok(Vec::new()),
        Some(p) => {
            if p.exists() {
                m.input("ledger", p, &read(p)?);
            }
            let l = Ledger::open(pp.clone(), key_gen(pp).vk, p)?;
            Ok(l.leaves().to_vec())
        }
    }
}

fn prove(a: &ProveArgs, m: &mut RunManifest) -> Result<(), CliError> {
    let pp = load_pp(&a.pp, m)?;
    let cfg = load_config(a.config.as_deref(), m)?;
    let seq = load_seq(&a.seq, m)?;
    m.seed("owner", a.owner);
    if a.scale_bits != DEFAULT_SCALE_BITS {
        m.set("scale_bits", a.scale_bits);
    }
    let keys = key_gen(&pp);
    let addr = addr_gen(&pp, a.owner)?;
    let run = match audit(&pp, &keys, &addr, &seq, &cfg, a.scale_bits) {
        Err(e @ ProtocolError::PredicateFailure(_)) => return Err(CliError::Rejected(e.to_string())),
        other => other?,
    };
    let prior = prior_leaves(&pp, a.ledger.as_deref(), m)?;
    let tx = build_transaction(&pp, &keys.vk, &run.outer, &prior)?;
    m.output("tx", &a.out, &tx.to_bytes())?;
    if let Some(p) = &a.records {
        m.output("records", p, &encode_records(&run.records))?;
    }
    if let Some(p) = &a.report {
        m.output("report", p, run.inner.report.to_text().as_bytes())?;
    }
    m.timing("inner_prove", run.inner_time);
    m.timing("outer_prove", run.outer_time);
    m.ops("inner_prove", &run.inner_ops);
    m.ops("outer_prove", &run.outer_ops);
    println!(
        "transaction for {} records written to {} (inner {:.1} ms, outer {:.1} ms)",
        run.records.len(),
        a.out.display(),
        run.inner_time.as_secs_f64() * 1e3,
        run.outer_time.as_secs_f64() * 1e3
    );
    Ok(())
}

fn audit_verify(pp: &Path, tx: &Path, ledger: Option<&Path>, m: &mut RunManifest) -> Result<(), CliError> {
    let pp = load_pp(pp, m)?;
    let bytes = read(tx)?;
    m.input("tx", tx, &bytes);
    let tx = Transaction::from_bytes(&bytes)?;
    let prior = prior_leaves(&pp, ledger, m)?;
    let mut ops = OpCounter::new();
    let t0 = Instant::now();
    let ok = verify_tx(&pp, &key_gen(&pp).vk, &tx, &prior, &mut ops)?;
    m.timing("verify", t0.elapsed());
    m.ops("verify", &ops);
    m.set("result.verify", u8::from(ok));
    println!("verify = {}", u8::from(ok));
    print!("{ops}\n");
    if ok {
        Ok(())
    } else {
        Err(CliError::Rejected("transaction rejected".into()))
    }
}

fn ledger(cmd: &LedgerCmd, m: &mut RunManifest) -> Result<(), CliError> {
    let (pp, path) = match cmd {
        LedgerCmd::Submit { pp, ledger, .. } | LedgerCmd::Verify { pp, ledger, .. } | LedgerCmd::Stats { pp, ledger } => {
            (load_pp(pp, m)?, ledger)
        }
    };
    if path.exists() {
        m.input("ledger", path, &read(path)?);
    }
    let mut l = Ledger::open(pp.clone(), key_gen(&pp).vk, path)?;
    match cmd {
        LedgerCmd::Submit { tx, .. } => {
            let bytes = read(tx)?;
            m.input("tx", tx, &bytes);
            let r = l.submit(Transaction::from_bytes(&bytes)?)?;
            m.timing("verify", r.verify_time);
            m.ops("verify", &r.ops);
            m.set("result.accepted", r.accepted);
            m.set("result.tx_digest", hex(&r.tx_digest));
            if let Some(h) = r.height {
                m.set("result.height", h);
                println!("accepted at height {h} (tx {})", hex(&r.tx_digest));
                Ok(())
            } else {
                m.set("result.replay", r.replay);
                let why = r.reason.unwrap_or_default();
                Err(CliError::Rejected(why))
            }
        }
        LedgerCmd::Verify { height, .. } => {
            let mut ops = OpCounter::new();
            let t0 = Instant::now();
            let ok = l.verify_block(*height, &mut ops)?;
            m.timing("verify", t0.elapsed());
            m.ops("verify", &ops);
            m.set("result.verify", u8::from(ok));
            println!("block {height}: verify = {}", u8::from(ok));
            if ok {
                Ok(())
            } else {
                Err(CliError::Rejected(format!("block {height} does not verify")))
            }
        }
        LedgerCmd::Stats { .. } => {
            let s = l.stats();
            println!("blocks = {}", s.blocks);
            println!("leaves = {}", s.leaves);
            if let Some(b) = l.blocks().last() {
                println!("tip.height = {}", b.height);
                println!("tip.timestamp = {}", b.timestamp);
                println!("tip.tx_digest = {}", hex(&b.tx_digest));
                println!("tip.ledger_digest = {}", digest_hex(&b.tx.ledger_digest));
            }
            println!("replay.verify_ms = {:.3}", s.verify_time.as_secs_f64() * 1e3);
            println!("{}", s.ops);
            m.set("result.blocks", s.blocks);
            m.set("result.leaves", s.leaves);
            m.ops("replay", &s.ops);
            m.timing("replay_verify", s.verify_time);
            Ok(())
        }
    }
}

fn acs_dump(file: &Path, pp: Option<&Path>, m: &mut RunManifest) -> Result<(), CliError> {
    let bytes = read(file)?;
    m.input("file", file, &bytes);
    let tag = read_sections(&bytes)?.first().map(|s| s.0);
    let (accu, pi_acs) = match tag {
        Some(TAG_OUTERPRF) => {
            let o = OuterOutput::from_bytes(&bytes)?;
            (o.accu, o.pi_acs)
        }
        Some(TAG_TRANSACT) => {
            let t = Transaction::from_bytes(&bytes)?;
            (t.accu, t.pi_acs)
        }
        _ => return Err(CliError::Usage("acs dump expects an OUTERPRF or TRANSACT file".into())),
    };
    println!("accu.bytes = {}", accu.to_bytes().len());
    println!("accu.lhs = {}", hex(&g1_to_bytes(&accu.lhs)));
    println!("accu.rhs = {}", hex(&g1_to_bytes(&accu.rhs)));
    println!("pi_acs.bytes = {}", pi_acs.to_bytes().len());
    println!("pi_acs.rho = {}", digest_hex(&pi_acs.rho));
    println!("pi_acs.rho_hat = {}", digest_hex(&pi_acs.rho_hat));
    println!("pi_acs.transcript = {}", hex(&pi_acs.transcript_digest));
    if let Some(p) = pp {
        let pp = load_pp(p, m)?;
        let mut ops = OpCounter::new();
        let ok = acs_decide(&acs_keygen(&pp.srs, &pp.hash).dk, &accu, &mut ops);
        m.ops("decide", &ops);
        println!("decide = {}", u8::from(ok));
        println!("decide.pairing_checks = {}", ops.pairing_checks);
        if !ok {
            return Err(CliError::Rejected("decider rejects the accumulator".into()));
        }
    }
    Ok(())
}

fn bench(a: &BenchArgs, m: &mut RunManifest) -> Result<(), CliError> {
    m.seed("master", a.seed);
    m.seed("owner", a.owner);
    let pp = match &a.pp {
        Some(p) => load_pp(p, m)?,
        None => didm_gen(SECURITY_LEVEL, a.seed, toy_arch().total_params())?,
    };
    let cfg = load_config(a.config.as_deref(), m)?;
    let bc = BenchConfig {
        num_irs: a.num_irs.clone(),
        trials: a.trials,
        reps: a.reps,
        seed: a.seed,
        owner: a.owner,
        scale_bits: DEFAULT_SCALE_BITS,
        compare_hash: !a.no_hash_compare,
    };
    let report = run_bench(&pp, &bc, &cfg).map_err(|e| match e {
        ProtocolError::Params(s) => CliError::Usage(s),
        e => e.into(),
    })?;
    let text = report.to_text();
    print!("{text}");
    if let Some(p) = &a.out {
        m.output("report", p, text.as_bytes())?;
    }
    if let Some(p) = &a.csv {
        m.output("csv", p, report.to_csv().as_bytes())?;
    }
    for r in &report.rows {
        m.timing(&format!("num{}.prove", r.num), r.prove_median());
        m.timing(&format!("num{}.verify", r.num), r.verify_median());
    }
    m.set("bench.trials", a.trials);
    m.set("bench.reps", a.reps);
    m.set("result.passed", report.passed());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Rejected("bench expectations not met (see report)".into()))
    }
}
