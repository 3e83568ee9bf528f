//! `RunManifest`: one per invocation, key-value text.
//!
//! Everything outside the `timing.` and `ops.` keys is a function of the
//! arguments and input files, so re-running the recorded argv against the
//! recorded inputs reproduces the recorded outputs.

use crate::error::CliError;
use crate::fsio::{sha256_hex, write_atomic};
use didm_crypto::OpCounter;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    entries: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            argv,
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.set(&format!("seed.{name}"), seed);
    }

    pub fn input(&mut self, name: &str, path: &Path, bytes: &[u8]) {
        self.set(&format!("input.{name}"), format!("{} sha256:{}", path.display(), sha256_hex(bytes)));
    }

    pub fn config_digest(&mut self, name: &str, canonical: &[u8]) {
        self.set(&format!("config.{name}"), format!("sha256:{}", sha256_hex(canonical)));
    }

    /// Writes `bytes` to `path` and records it.
    pub fn output(&mut self, name: &str, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(path, bytes)?;
        self.set(&format!("output.{name}"), format!("{} sha256:{}", path.display(), sha256_hex(bytes)));
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    pub fn timing(&mut self, name: &str, d: Duration) {
        self.set(&format!("timing.{name}_ms"), format!("{:.3}", d.as_secs_f64() * 1e3));
    }

    pub fn ops(&mut self, name: &str, ops: &OpCounter) {
        for (k, v) in [
            ("pairings", ops.pairings),
            ("pairing_checks", ops.pairing_checks),
            ("g1_muls", ops.g1_muls),
            ("g1_adds", ops.g1_adds),
            ("hashes", ops.hashes),
        ] {
            self.set(&format!("ops.{name}.{k}"), v);
        }
    }

    pub fn to_text(&self, exit_code: i32) -> String {
        let mut s = format!("command = {}\n", self.command);
        s += &format!("argv = {}\n", self.argv.join(" "));
        s += &format!("version = {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.entries {
            s += &format!("{k} = {v}\n");
        }
        s += &format!("exit_code = {exit_code}\n");
        s
    }

    /// `explicit`, else next to the first output, else
    /// `didm-<command>.manifest` in the working directory.
    pub fn path(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        if let Some(first) = self.outputs.first() {
            let mut s = first.clone().into_os_string();
            s.push(".manifest");
            return PathBuf::from(s);
        }
        PathBuf::from(format!("didm-{}.manifest", self.command.replace(' ', "-")))
    }

    pub fn write(&self, explicit: Option<&Path>, exit_code: i32) -> Result<PathBuf, CliError> {
        let p = self.path(explicit);
        write_atomic(&p, self.to_text(exit_code).as_bytes())?;
        Ok(p)
    }
}
