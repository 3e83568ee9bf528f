use clap::{Args, Parser, Subcommand};
use didm_core::forge::AttackFamily;
use didm_core::DEFAULT_SCALE_BITS;
use didm_crypto::HashVariant;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "didm", version, about = "Model identity records, audit proofs and a simulated ledger")]
pub struct Cli {
    /// Where to write the run manifest [default: next to the first output,
    /// else ./didm-<command>.manifest]
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate public parameters
    Setup(SetupArgs),
    /// Train genuine checkpoint sequences or forge histories
    #[command(subcommand)]
    Forge(ForgeCmd),
    /// Prove or verify an audit transaction
    #[command(subcommand)]
    Audit(AuditCmd),
    /// Operate on a ledger journal
    #[command(subcommand)]
    Ledger(LedgerCmd),
    /// Accumulator utilities
    #[command(subcommand)]
    Acs(AcsCmd),
    /// Print the structure of a file, without secrets
    Inspect {
        file: PathBuf,
    },
    /// Prover/verifier cost across numbers of identity records
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Setup(_) => "setup",
            Command::Forge(ForgeCmd::Train { .. }) => "forge train",
            Command::Forge(ForgeCmd::Attack { .. }) => "forge attack",
            Command::Forge(ForgeCmd::Eval { .. }) => "forge eval",
            Command::Audit(AuditCmd::Prove(_)) => "audit prove",
            Command::Audit(AuditCmd::Verify { .. }) => "audit verify",
            Command::Ledger(LedgerCmd::Submit { .. }) => "ledger submit",
            Command::Ledger(LedgerCmd::Verify { .. }) => "ledger verify",
            Command::Ledger(LedgerCmd::Stats { .. }) => "ledger stats",
            Command::Acs(AcsCmd::Dump { .. }) => "acs dump",
            Command::Inspect { .. } => "inspect",
            Command::Bench(_) => "bench",
        }
    }
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    /// Master seed; the SRS trapdoor is derivable from it, so this is a simulation setup
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest model (parameter count) the parameters support [default: the toy MLP]
    #[arg(long)]
    pub max_params: Option<usize>,
    /// Hash for commitments and challenges: sponge or pedersen
    #[arg(long, default_value = "sponge")]
    pub hash: HashVariant,
    /// Also write the proving/verification keys here
    #[arg(long)]
    pub keys: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ForgeCmd {
    /// Train the toy MLP on its synthetic dataset; dataset and init share --seed
    Train {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forge a history for a victim's final weights
    Attack {
        #[arg(long)]
        family: AttackFamily,
        #[arg(long)]
        victim: PathBuf,
        /// Seed of the victim's dataset (the --seed it was trained with)
        #[arg(long)]
        data_seed: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        poison_rate: Option<f64>,
        #[arg(long)]
        lambda_ce: Option<f64>,
    },
    /// Evaluate the predicates on a sequence
    Eval {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AuditCmd {
    /// Records, inner and outer proof; writes a transaction
    Prove(ProveArgs),
    /// Verify a transaction against the ledger state it was built on
    Verify {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        tx: PathBuf,
        /// Ledger whose current leaves the transaction extends [default: empty ledger]
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[arg(long)]
    pub pp: PathBuf,
    #[arg(long)]
    pub seq: PathBuf,
    /// Seed of the owner's address keys
    #[arg(long)]
    pub owner: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// TOML file with a [predicates] table
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Build on top of this ledger's current state
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    /// Also write the identity records (owner-side; contains weights)
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Also write the predicate report
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SCALE_BITS)]
    pub scale_bits: u32,
}

#[derive(Debug, Subcommand)]
pub enum LedgerCmd {
    /// Verify and append a transaction
    Submit {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, default_value = "ledger.a2d")]
        ledger: PathBuf,
        tx: PathBuf,
    },
    /// Re-verify the block at a height
    Verify {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, default_value = "ledger.a2d")]
        ledger: PathBuf,
        height: u64,
    },
    /// Counts, op counters and timing from replaying the journal
    Stats {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, default_value = "ledger.a2d")]
        ledger: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AcsCmd {
    /// Print the accumulator and its proof from an outer proof or transaction
    Dump {
        file: PathBuf,
        /// Also run the decider under these parameters
        #[arg(long)]
        pp: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Parameters to use [default: generated from --seed, sized to the toy MLP]
    #[arg(long)]
    pub pp: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub owner: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,10")]
    pub num_irs: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Runs per column per trial; the trial keeps the fastest
    #[arg(long, default_value_t = 7)]
    pub reps: usize,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Key-value report [default: stdout only]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Skip the sponge vs. pedersen comparison
    #[arg(long)]
    pub no_hash_compare: bool,
}
