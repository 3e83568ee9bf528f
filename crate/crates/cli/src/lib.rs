//! The `didm` command line.
//!
//! Exit codes: 0 success, 1 a proof, transaction or predicate check was
//! rejected, 2 usage or I/O error.

pub mod args;
pub mod bench;
mod commands;
pub mod error;
pub mod fsio;
mod inspect;
pub mod manifest;

use args::Cli;
use clap::Parser;
use manifest::RunManifest;
use std::ffi::OsString;
use std::time::Instant;

pub use inspect::inspect;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut m = RunManifest::new(cli.command.name(), argv);
    let t0 = Instant::now();
    let res = commands::dispatch(&cli.command, &mut m);
    m.timing("total", t0.elapsed());
    let code = match &res {
        Ok(()) => 0,
        Err(e) => {
            match e {
                error::CliError::Rejected(msg) => eprintln!("rejected: {msg}"),
                other => eprintln!("error: {other}"),
            }
            m.set("error", e);
            e.exit_code()
        }
    };
    if let Err(e) = m.write(cli.manifest.as_deref(), code) {
        eprintln!("error: {e}");
        return 2;
    }
    code
}
