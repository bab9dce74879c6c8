mod error;
mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::io::Format;

/// Regular extension of functions and pseudometrics from a subset of a
/// finite metric space.
#[derive(Debug, Parser)]
#[command(name = "sqjoin", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extend p from the subset X to the whole space.
    Extend(ExtendArgs),
    /// Group-averaged extension of an invariant p.
    Equivariant {
        #[command(flatten)]
        base: ExtendArgs,
        /// JSON list of permutations (arrays of ids); the generated group is used.
        #[arg(long)]
        group: PathBuf,
    },
    /// Equivariant extension plus a small multiple of the truncated metric.
    NearIsometric {
        #[command(flatten)]
        base: ExtendArgs,
        /// JSON list of permutations; identity when omitted.
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
    },
    /// Check a matrix for pseudometric or metric axioms, and optionally
    /// sample regularity of the extension operator.
    Verify(VerifyArgs),
    /// Build an epsilon-net of the lifted pseudometric and check it by sampling.
    NetCheck(NetCheckArgs),
    /// Run the built-in three-point example.
    Demo {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// Distance matrix of the whole space (CSV or JSON).
    #[arg(long = "metric-d")]
    pub metric_d: PathBuf,
    /// Points of X, as comma-separated indices or ids.
    #[arg(long)]
    pub subset: String,
    /// Matrix over the subset ids; the restriction of d when omitted.
    #[arg(long = "pseudometric-p")]
    pub pseudometric_p: Option<PathBuf>,
    #[arg(long = "truncation-N")]
    pub truncation: Option<u32>,
    /// Base points a,b of X (indices or ids).
    #[arg(long = "points-ab")]
    pub points_ab: Option<String>,
    /// Keep the weights 2^-n instead of rescaling them to sum to one.
    #[arg(long = "raw-weights")]
    pub raw_weights: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output format; defaults to the format of --metric-d.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output matrix path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report with provenance and checks.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Matrix to check.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Also require positivity off the diagonal.
    #[arg(long = "require-metric")]
    pub require_metric: bool,
    /// With --subset, sample regularity of the extension operator over this space.
    #[arg(long = "metric-d")]
    pub metric_d: Option<PathBuf>,
    #[arg(long, requires = "metric_d")]
    pub subset: Option<String>,
    #[arg(long = "truncation-N")]
    pub truncation: Option<u32>,
    #[arg(long = "raw-weights")]
    pub raw_weights: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct NetCheckArgs {
    #[arg(long = "pseudometric-p")]
    pub pseudometric_p: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
