//! `phasebound` command-line interface.
//!
//! Exit codes: 0 success, 2 usage error, 3 computation error,
//! 4 not detectable.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use phasebound::{Family, DEFAULT_TAIL_TOL};
use phasebound::decision::DEFAULT_PHI_GRID;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HypothesisArg {
    H0,
    H1,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "phasebound", version, args_override_self = true)]
#[command(about = "Neyman-Pearson limits on interferometric phase detection")]
pub struct Cli {
    /// Output format (default: csv for tables, json for single results)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Bound on the probability mass dropped by Fock-space truncation
    #[arg(long = "tail-tol", global = true, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,

    /// Number of points in the coarse φ scan of the φ_M solver
    #[arg(long, global = true, default_value_t = DEFAULT_PHI_GRID)]
    pub grid: usize,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ROC of the optimal test at a fixed phase shift, analytic and from the
    /// eigen-measurement
    #[command(args_override_self = true)]
    Roc {
        /// State, e.g. `coherent:alpha=1.0` or `custom:@weights.csv`
        #[arg(long)]
        state: String,
        /// Phase shift in radians, in (0, π]
        #[arg(long)]
        phi: f64,
        /// Number of multiplier values swept
        #[arg(long, default_value_t = phasebound::decision::DEFAULT_LAMBDA_POINTS)]
        points: usize,
    },

    /// Minimum detectable phase for one state
    #[command(args_override_self = true)]
    Phimin {
        #[arg(long, conflicts_with_all = ["family", "n", "beta"])]
        state: Option<String>,
        #[arg(long, value_parser = parse_family, requires = "n")]
        family: Option<Family>,
        /// Mean photon number budget
        #[arg(long)]
        n: Option<f64>,
        /// Fraction of the budget spent on squeezing (squeezed family only)
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        p01: f64,
        #[arg(long = "phi-max", default_value_t = std::f64::consts::PI)]
        phi_max: f64,
    },

    /// φ_M across a range of photon budgets, with a power-law fit
    #[command(args_override_self = true)]
    Sweep {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// `lo:hi:count:log` or `lo:hi:count:lin`
        #[arg(long = "n-range")]
        n_range: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        p01: f64,
    },

    /// φ_M of squeezed states across the squeezing fraction at fixed budget
    #[command(name = "beta-scan", args_override_self = true)]
    BetaScan {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        p01: f64,
    },

    /// Monte-Carlo run of the eigen-measurement decision rule
    #[command(args_override_self = true)]
    Simulate {
        /// Overlap modulus |⟨ψ₀|ψ₁⟩|
        #[arg(long, conflicts_with_all = ["state", "phi"], required_unless_present = "state")]
        c: Option<f64>,
        #[arg(long, requires = "phi")]
        state: Option<String>,
        #[arg(long, requires = "state")]
        phi: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_enum)]
        hypothesis: HypothesisArg,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // A panic is a computation failure; keep the exit code in {0, 2, 3, 4}.
    std::panic::set_hook(Box::new(|info| {
        eprintln!("error: internal failure: {info}");
        std::process::exit(3);
    }));
    let argv = match config::expand_config(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
