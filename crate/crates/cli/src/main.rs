//! `antimark` command-line front end.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Failure, Report};

/// Environment variable overriding the default tolerance; `--tol` wins over it.
pub const TOL_ENV: &str = "ANTIMARK_TOL";

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "antimark", version, about = "Antidistinguishability and local state antimarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,

    /// Exclusion tolerance (overrides ANTIMARK_TOL).
    #[arg(long, global = true, value_name = "EPS")]
    pub tol: Option<f64>,

    /// Seed for the feasibility search restarts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    /// Catalog name or path to an ensemble JSON file.
    #[arg(long)]
    pub ensemble: String,

    /// Ensemble parameter, `theta=<radians>`.
    #[arg(long, value_name = "theta=V")]
    pub param: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Global,
    Local,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildMethod {
    PairwiseWalgate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Nl2,
    Theta4,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List built-in ensembles.
    Catalog,
    /// Decide global or local antidistinguishability.
    CheckAntidist {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Decide (n, m) local state antimarking.
    CheckLsam {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u128,
        /// Allow a global measurement on the sequence ensemble.
        #[arg(long)]
        global: bool,
        /// Sequence protocol to verify instead of a built-in construction.
        #[arg(long)]
        protocol: Option<std::path::PathBuf>,
    },
    /// Verify an LOCC exclusion protocol from a file.
    VerifyProtocol {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        protocol: std::path::PathBuf,
        /// Check conclusive identification instead of exclusion.
        #[arg(long)]
        conclusive: bool,
    },
    /// Sweep θ for a parametrized family and locate verdict boundaries.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Build a local exclusion protocol and write it as JSON.
    BuildProtocol {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_enum)]
        method: BuildMethod,
        #[arg(long)]
        out: std::path::PathBuf,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = run(&cli);
    match outcome {
        Ok(mut report) => {
            report.command = argv;
            report.duration_seconds = start.elapsed().as_secs_f64();
            let code = report.exit_code;
            let body = if cli.common.json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => s + "\n",
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_DATA);
                    }
                }
            } else {
                report.text
            };
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let ctx = commands::Context::new(&cli.common)?;
    match &cli.command {
        Command::Catalog => commands::catalog(),
        Command::CheckAntidist { ensemble, mode } => commands::check_antidist(&ctx, ensemble, *mode),
        Command::CheckLsam { ensemble, n, m, global, protocol } => {
            commands::check_lsam(&ctx, ensemble, *n, *m, *global, protocol.as_deref())
        }
        Command::VerifyProtocol { ensemble, protocol, conclusive } => {
            commands::verify_protocol(&ctx, ensemble, protocol, *conclusive)
        }
        Command::Sweep { family, min, max, steps } => commands::sweep(&ctx, *family, *min, *max, *steps),
        Command::BuildProtocol { ensemble, method, out } => commands::build_protocol(&ctx, ensemble, *method, out),
    }
}
