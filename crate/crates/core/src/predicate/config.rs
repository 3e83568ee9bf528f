use super::PredicateError;
use crate::forge::InitSpec;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The mixture fitted by IWFW always has two components.
pub const GMM_COMPONENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    Cwcd,
    Iwfw,
    Mwcd,
}

impl PredicateKind {
    pub const ALL: [PredicateKind; 3] = [PredicateKind::Cwcd, PredicateKind::Iwfw, PredicateKind::Mwcd];
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredicateKind::Cwcd => "CWCD",
            PredicateKind::Iwfw => "IWFW",
            PredicateKind::Mwcd => "MWCD",
        })
    }
}

/// Which mixture the IWFW goodness-of-fit compares the initial weights to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GmmReference {
    /// The initialization distribution named by `init_spec`. At toy layer
    /// sizes the sampling noise of this comparison alone exceeds the default
    /// `emd_threshold`.
    Prescribed,
    /// A two-component mixture fitted to the layer's own weights.
    #[default]
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredicateConfig {
    /// Safety margin in units of DisStd.
    pub epsilon: f64,
    pub k_random_inits: usize,
    pub emd_threshold: f64,
    pub pca_threshold: f64,
    /// MWCD bound on the adjacent-checkpoint projection distance.
    pub delta: f64,
    /// Initialization family the reference checkpoints are drawn from.
    pub init_spec: InitSpec,
    /// Seed for the CWCD reference initializations.
    pub reference_seed: u64,
    pub gmm_reference: GmmReference,
    pub gmm_max_iters: usize,
    pub gmm_tol: f64,
    /// Mixture draws per empirical weight when estimating the EMD.
    pub emd_oversample: usize,
    pub emd_seed: u64,
}

impl PredicateConfig {
    /// δ for the default 4→16→2 toy setup: three times the largest adjacent
    /// projection distance over five clean training runs
    /// (see [`calibrate_delta`](super::calibrate_delta)).
    pub const DEFAULT_DELTA: f64 = 3.134;
}

impl Default for PredicateConfig {
    fn default() -> Self {
        Self {
            epsilon: 5.0,
            k_random_inits: 30,
            emd_threshold: 0.05,
            pca_threshold: 0.6,
            delta: Self::DEFAULT_DELTA,
            init_spec: InitSpec::default(),
            reference_seed: 0x5eed,
            gmm_reference: GmmReference::Fitted,
            gmm_max_iters: 200,
            gmm_tol: 1e-8,
            emd_oversample: 10,
            emd_seed: 0xe3d,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    predicates: PredicateConfig,
}

impl PredicateConfig {
    pub fn validate(&self) -> Result<(), PredicateError> {
        let bad = |m: &str| Err(PredicateError::Config(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be > 0");
        }
        if self.k_random_inits < 10 {
            return bad("k_random_inits must be >= 10");
        }
        if !(self.pca_threshold > 0.0 && self.pca_threshold < 1.0) {
            return bad("pca_threshold must lie in (0, 1)");
        }
        if !(self.delta > 0.0) {
            return bad("delta must be > 0");
        }
        if !(self.emd_threshold >= 0.0) {
            return bad("emd_threshold must be >= 0");
        }
        if self.emd_oversample == 0 {
            return bad("emd_oversample must be >= 1");
        }
        self.init_spec.validate().map_err(PredicateError::Config)
    }

    /// Reads the `[predicates]` table of a TOML document; missing keys keep
    /// their defaults.
    pub fn from_toml_str(s: &str) -> Result<Self, PredicateError> {
        let file: ConfigFile = toml::from_str(s).map_err(|e| PredicateError::Config(e.to_string()))?;
        file.predicates.validate()?;
        Ok(file.predicates)
    }

    pub fn to_toml_string(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            predicates: &'a PredicateConfig,
        }
        toml::to_string(&Out { predicates: self }).expect("config serializes")
    }

    /// Canonical byte description of the policy one predicate enforces.
    /// Floats are written by bit pattern so equal policies give equal bytes.
    pub fn descriptor(&self, kind: PredicateKind) -> Vec<u8> {
        let f = |x: f64| format!("{:016x}", x.to_bits());
        let s = match kind {
            PredicateKind::Cwcd => format!(
                "cwcd;epsilon={};k={};init={};seed={}",
                f(self.epsilon),
                self.k_random_inits,
                init_descriptor(&self.init_spec),
                self.reference_seed
            ),
            PredicateKind::Iwfw => format!(
                "iwfw;components={GMM_COMPONENTS};reference={};emd={};pca={};iters={};tol={};oversample={};seed={}",
                match self.gmm_reference {
                    GmmReference::Prescribed => init_descriptor(&self.init_spec),
                    GmmReference::Fitted => "fitted".to_string(),
                },
                f(self.emd_threshold),
                f(self.pca_threshold),
                self.gmm_max_iters,
                f(self.gmm_tol),
                self.emd_oversample,
                self.emd_seed
            ),
            PredicateKind::Mwcd => format!("mwcd;delta={}", f(self.delta)),
        };
        s.into_bytes()
    }
}

fn init_descriptor(spec: &InitSpec) -> String {
    let f = |x: f64| format!("{:016x}", x.to_bits());
    match spec {
        InitSpec::Gmm2 { weights, means, stds } => format!(
            "gmm2({},{},{},{},{},{})",
            f(weights[0]),
            f(weights[1]),
            f(means[0]),
            f(means[1]),
            f(stds[0]),
            f(stds[1])
        ),
        InitSpec::Gaussian { mean, std } => format!("gaussian({},{})", f(*mean), f(*std)),
    }
}
