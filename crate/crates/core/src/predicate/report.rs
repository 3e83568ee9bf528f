use super::checks::{CwcdOutcome, IwfwOutcome, MwcdOutcome};
use super::config::PredicateKind;
use super::PredicateError;
use std::fmt::Write as _;

/// Outcome of all three predicates on one sequence.
///
/// Text form is one `name = value` line per field; floats are written with
/// `{:?}` so they parse back bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateReport {
    pub cwcd_value: f64,
    pub dis_mean: f64,
    pub dis_std: f64,
    pub cwcd_pass: bool,
    pub cwcd_degenerate: bool,
    /// Largest per-layer EMD.
    pub iwfw1_value: f64,
    /// Largest per-layer PCA variance share.
    pub iwfw2_value: f64,
    pub iwfw_pass: bool,
    pub iwfw_excluded_layers: Vec<usize>,
    pub iwfw_pca_skipped_layers: Vec<usize>,
    pub mwcd_value: f64,
    pub mwcd_pass: bool,
    pub all_pass: bool,
}

const FIELDS: [&str; 13] = [
    "cwcd_value",
    "dis_mean",
    "dis_std",
    "cwcd_pass",
    "cwcd_degenerate",
    "iwfw1_value",
    "iwfw2_value",
    "iwfw_pass",
    "iwfw_excluded_layers",
    "iwfw_pca_skipped_layers",
    "mwcd_value",
    "mwcd_pass",
    "all_pass",
];

fn list(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl PredicateReport {
    pub fn assemble(cwcd: CwcdOutcome, iwfw: IwfwOutcome, mwcd: MwcdOutcome) -> Self {
        Self {
            cwcd_value: cwcd.value,
            dis_mean: cwcd.dis_mean,
            dis_std: cwcd.dis_std,
            cwcd_pass: cwcd.pass,
            cwcd_degenerate: cwcd.degenerate,
            iwfw1_value: iwfw.emd_max,
            iwfw2_value: iwfw.pca_max,
            iwfw_pass: iwfw.pass,
            iwfw_excluded_layers: iwfw.excluded_layers,
            iwfw_pca_skipped_layers: iwfw.pca_skipped_layers,
            mwcd_value: mwcd.value,
            mwcd_pass: mwcd.pass,
            all_pass: cwcd.pass && iwfw.pass && mwcd.pass,
        }
    }

    pub fn passed(&self, kind: PredicateKind) -> bool {
        match kind {
            PredicateKind::Cwcd => self.cwcd_pass,
            PredicateKind::Iwfw => self.iwfw_pass,
            PredicateKind::Mwcd => self.mwcd_pass,
        }
    }

    pub fn failures(&self) -> Vec<PredicateKind> {
        PredicateKind::ALL.into_iter().filter(|k| !self.passed(*k)).collect()
    }

    fn values(&self) -> [String; 13] {
        [
            format!("{:?}", self.cwcd_value),
            format!("{:?}", self.dis_mean),
            format!("{:?}", self.dis_std),
            self.cwcd_pass.to_string(),
            self.cwcd_degenerate.to_string(),
            format!("{:?}", self.iwfw1_value),
            format!("{:?}", self.iwfw2_value),
            self.iwfw_pass.to_string(),
            list(&self.iwfw_excluded_layers),
            list(&self.iwfw_pca_skipped_layers),
            format!("{:?}", self.mwcd_value),
            self.mwcd_pass.to_string(),
            self.all_pass.to_string(),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in FIELDS.iter().zip(self.values()) {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PredicateError> {
        let err = |m: String| PredicateError::Report(m);
        let mut vals: [Option<&str>; 13] = [None; 13];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("no '=' in line {line:?}")))?;
            let k = k.trim();
            let i = FIELDS
                .iter()
                .position(|f| *f == k)
                .ok_or_else(|| err(format!("unknown field {k:?}")))?;
            if vals[i].replace(v.trim()).is_some() {
                return Err(err(format!("duplicate field {k:?}")));
            }
        }
        let get = |i: usize| vals[i].ok_or_else(|| err(format!("missing field {:?}", FIELDS[i])));
        let f = |i: usize| -> Result<f64, PredicateError> {
            get(i)?.parse().map_err(|_| err(format!("bad number for {}", FIELDS[i])))
        };
        let b = |i: usize| -> Result<bool, PredicateError> {
            get(i)?.parse().map_err(|_| err(format!("bad bool for {}", FIELDS[i])))
        };
        let l = |i: usize| -> Result<Vec<usize>, PredicateError> {
            let s = get(i)?;
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|x| x.trim().parse().map_err(|_| err(format!("bad list for {}", FIELDS[i]))))
                .collect()
        };
        let r = Self {
            cwcd_value: f(0)?,
            dis_mean: f(1)?,
            dis_std: f(2)?,
            cwcd_pass: b(3)?,
            cwcd_degenerate: b(4)?,
            iwfw1_value: f(5)?,
            iwfw2_value: f(6)?,
            iwfw_pass: b(7)?,
            iwfw_excluded_layers: l(8)?,
            iwfw_pca_skipped_layers: l(9)?,
            mwcd_value: f(10)?,
            mwcd_pass: b(11)?,
            all_pass: b(12)?,
        };
        if r.all_pass != (r.cwcd_pass && r.iwfw_pass && r.mwcd_pass) {
            return Err(err("all_pass disagrees with the individual verdicts".into()));
        }
        Ok(r)
    }

    /// Canonical bytes for hashing: the text form is already canonical.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        self.to_text().into_bytes()
    }
}
