//! `spectralpath` command-line tool.
//!
//! Exit codes: 0 pass/true, 1 false, 2 input error, 3 numerical or property
//! failure.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use spectralpath::theorems::Theorem;
use spectralpath::Tolerance;

/// Pattern and spectral analysis of nonnegative matrices and symmetric association schemes.
#[derive(Debug, Parser)]
#[command(name = "spectralpath", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalFlags {
    /// Entries at or below this magnitude count as zero.
    #[arg(long, global = true)]
    zero_tol: Option<f64>,
    /// Eigenvalue distinctness threshold.
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    /// Threshold for verified identities.
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Random seed (falls back to SPECTRALPATH_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pattern graph, spectral class, symmetrizer and entry-product profiles.
    Analyze {
        path: PathBuf,
        /// Row index of a single profile to print (needs --t).
        #[arg(long, requires = "t")]
        s: Option<usize>,
        /// Column index of a single profile to print (needs --s).
        #[arg(long, requires = "s")]
        t: Option<usize>,
    },
    /// Evaluate both sides of a characterization at (s, t).
    Check {
        path: PathBuf,
        /// mainsym (bidirected path) or main (directed distance).
        #[arg(long, value_parser = parse_theorem)]
        theorem: Theorem,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// Association scheme from a file or `builtin:hypercube(n)` / `builtin:complete(n)`.
    Scheme {
        source: String,
        #[command(subcommand)]
        action: SchemeAction,
    },
    /// Run the randomized invariant suites.
    Selftest {
        /// Largest d (matrix order d + 1) exercised.
        #[arg(long, default_value_t = 8)]
        d_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Corrupt one verdict on purpose to confirm failures are reported.
        #[arg(long, hide = true)]
        force_bug: bool,
    },
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeAction {
    /// Valencies, multiplicities, eigenmatrices and Krein extremes.
    Info,
    /// P-polynomial structures.
    PPoly,
    /// Q-polynomial structures.
    QPoly,
    /// P-polynomial relative to A_B with last relation A_C, both ways.
    KnP { b: usize, c: usize },
    /// Q-polynomial relative to E_E with last idempotent E_F, both ways.
    KnQ { e: usize, f: usize },
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse()
}

/// Resolved settings shared by every command.
pub struct Context {
    pub tol: Tolerance,
    pub seed: u64,
    pub json: bool,
    pub command: Vec<String>,
}

fn resolve(global: &GlobalFlags) -> Result<Context, String> {
    let defaults = Tolerance::default();
    let pick = |v: Option<f64>, default: f64, name: &str| match v {
        None => Ok(default),
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        Some(x) => Err(format!("--{name} must be positive and finite, got {x}")),
    };
    let tol = Tolerance {
        zero_tol: pick(global.zero_tol, defaults.zero_tol, "zero-tol")?,
        eig_tol: pick(global.eig_tol, defaults.eig_tol, "eig-tol")?,
        residual_tol: pick(global.residual_tol, defaults.residual_tol, "residual-tol")?,
    };
    let seed = match global.seed {
        Some(s) => s,
        None => match std::env::var("SPECTRALPATH_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| format!("SPECTRALPATH_SEED is not an unsigned integer: {v:?}"))?,
            Err(_) => 0,
        },
    };
    Ok(Context { tol, seed, json: global.json, command: std::env::args().skip(1).collect() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match resolve(&cli.global) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let code = match cli.command {
        Command::Analyze { path, s, t } => commands::analyze(&ctx, &path, s.zip(t)),
        Command::Check { path, theorem, s, t } => commands::check(&ctx, &path, theorem, s, t),
        Command::Scheme { source, action } => commands::scheme(&ctx, &source, &action),
        Command::Selftest { d_max, trials, force_bug } => commands::selftest(&ctx, d_max, trials, force_bug),
    };
    ExitCode::from(code)
}
