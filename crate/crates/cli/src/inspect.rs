//! `didm inspect`: structure of any file this tool writes. Secret scalars
//! and raw weights are never printed.

use crate::error::CliError;
use crate::fsio::{hex, sha256_hex};
use didm_core::codec::MAGIC;
use didm_core::decode_sequence;
use didm_crypto::curve::g1_to_bytes;
use didm_crypto::{Commitment, CURVE_ID};
use didm_protocol::codec::{read_sections, section, tag_name, TAG_ADDRKEYS, TAG_INNERPRF, TAG_IRRECORD, TAG_OUTERPRF, TAG_PPARAMS, TAG_PROOFKEY, TAG_TRANSACT};
use didm_protocol::keys::digest_hex;
use didm_protocol::record::decode_records;
use didm_protocol::{AddressKeys, InnerProof, OuterOutput, OuterStatement, ProofKeys, PublicParams, Transaction};
use std::fmt::Write as _;

const REDACTED: &str = "<redacted>";

fn cp(c: &Commitment) -> String {
    hex(&g1_to_bytes(&c.0))
}

fn statement(s: &mut String, st: &OuterStatement) {
    let _ = writeln!(s, "  pcp = {}", cp(&st.pcp));
    let _ = writeln!(s, "  irpk = {}", cp(&st.irpk));
    let _ = writeln!(s, "  cp_count = {}", st.cps.len());
    for (i, c) in st.cps.iter().enumerate() {
        let _ = writeln!(s, "  cp[{i}] = {}", cp(c));
    }
}

pub fn inspect(bytes: &[u8]) -> Result<String, CliError> {
    let mut s = String::new();
    if bytes.starts_with(MAGIC) {
        let seq = decode_sequence(bytes)?;
        let shapes: Vec<String> = seq.arch().layers().iter().map(|l| format!("{}x{}+{}", l.rows, l.cols, l.bias_len)).collect();
        let _ = writeln!(s, "checkpoint sequence ({} bytes)", bytes.len());
        let _ = writeln!(s, "  layers = {}", shapes.join(", "));
        let _ = writeln!(s, "  total_params = {}", seq.arch().total_params());
        let _ = writeln!(s, "  checkpoints = {}", seq.checkpoints().len());
        return Ok(s);
    }
    for (tag, body) in read_sections(bytes)? {
        let _ = writeln!(s, "[{}] {} bytes", tag_name(&tag), body.len());
        let one = section(tag, body);
        match tag {
            TAG_PPARAMS => {
                let pp = PublicParams::from_bytes(&one)?;
                let _ = writeln!(s, "  version = {}", pp.version);
                let _ = writeln!(s, "  curve = {CURVE_ID}");
                let _ = writeln!(s, "  lambda = {}", pp.lambda);
                let _ = writeln!(s, "  master_seed = {}", pp.master_seed);
                let _ = writeln!(s, "  max_total_w = {}", pp.max_total_w);
                let _ = writeln!(s, "  degree = {}", pp.degree());
                let _ = writeln!(s, "  hash = {} ({})", pp.hash.variant(), pp.hash.seed());
                let _ = writeln!(s, "  commit = {} generators ({})", pp.commit.capacity(), pp.commit.seed());
                let _ = writeln!(s, "  nizk = {} / {}", pp.zk.relation, pp.zk_in.relation);
                let _ = writeln!(s, "  srs_powers = {}", pp.srs.g1_powers().len());
            }
            TAG_ADDRKEYS => {
                let k = AddressKeys::from_bytes(&one)?;
                let _ = writeln!(s, "  irpk = {}", cp(&k.irpk));
                let _ = writeln!(s, "  sk_pr = {REDACTED}");
                let _ = writeln!(s, "  cr_kp = {REDACTED}");
            }
            TAG_IRRECORD => {
                for r in decode_records(&one)? {
                    let _ = writeln!(s, "  index = {}", r.index);
                    let _ = writeln!(s, "  cp = {}", cp(&r.cp));
                    let _ = writeln!(s, "  irpk = {}", cp(&r.irpk));
                    let _ = writeln!(s, "  epoch = {}", r.w.epoch);
                    let _ = writeln!(s, "  weights = {} values {REDACTED}", r.w.total_w());
                    for (name, id) in ["cwcd", "iwfw", "mwcd"].iter().zip(&r.predicate_ids) {
                        let _ = writeln!(s, "  predicate.{name} = {}", digest_hex(id));
                    }
                    let _ = writeln!(s, "  scale_bits = {}", r.aux.scale_bits);
                    let _ = writeln!(s, "  acs_params = {}", hex(&r.aux.acs_params));
                    let _ = writeln!(s, "  cr_kp = {REDACTED}");
                }
            }
            TAG_INNERPRF => {
                let p = InnerProof::from_bytes(&one)?;
                let _ = writeln!(s, "  openings = {}", p.openings.len());
                let _ = writeln!(s, "  point = {}", digest_hex(&p.point));
                let _ = writeln!(s, "  rho = {}", digest_hex(&p.rho));
                let _ = writeln!(s, "  report.all_pass = {}", p.report.all_pass);
                let _ = writeln!(s, "  report_digest = {}", hex(&p.report_digest));
            }
            TAG_OUTERPRF => {
                let o = OuterOutput::from_bytes(&one)?;
                statement(&mut s, &o.statement);
                let _ = writeln!(s, "  pi_out = {} body bytes, tag {}", o.pi_out.body.len(), hex(&o.pi_out.tag));
                let _ = writeln!(s, "  accu = {} bytes", o.accu.to_bytes().len());
            }
            TAG_PROOFKEY => {
                let k = ProofKeys::from_bytes(&one)?;
                for (name, rk) in [("pk_r", &k.pk.pk_r), ("pk_in", &k.pk.pk_in), ("vk_r", &k.vk.vk_r), ("vk_in", &k.vk.vk_in)] {
                    let _ = writeln!(
                        s,
                        "  {name} = key sha256:{} srs {} degree_bound {}",
                        sha256_hex(&rk.key.0),
                        hex(&rk.srs_digest[..8]),
                        rk.degree_bound
                    );
                }
            }
            TAG_TRANSACT => {
                let t = Transaction::from_bytes(&one)?;
                let _ = writeln!(s, "  ledger_digest = {}", digest_hex(&t.ledger_digest));
                statement(&mut s, &t.statement());
                let _ = writeln!(s, "  pi_out = {} body bytes", t.pi_out.body.len());
                let _ = writeln!(s, "  accu = {} bytes", t.accu.to_bytes().len());
                let _ = writeln!(s, "  nonce = {}", hex(&t.nonce));
            }
            _ => {
                let _ = writeln!(s, "  (unknown section)");
            }
        }
    }
    Ok(s)
}
