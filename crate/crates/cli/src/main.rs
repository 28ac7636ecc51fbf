//! Command-line front end: parameter ingestion, experiment orchestration,
//! and deterministic delimited-text output.

mod config;
mod modes;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Single-qubit Bloch trajectory with an integrator cross-check.
    SingleTrace,
    /// Witness eigenvalue of the evolved singlet, closed form vs spectrum.
    PairLambda,
    /// Measured vs predicted curvature across the entanglement angle.
    ThetaScan,
    /// Minimum witness eigenvalue across the Werner mixing weight.
    WernerScan,
    /// Minimum Choi eigenvalue of the single-qubit map over time.
    Choi,
    /// Positivity scan of an initial state under the dynamics.
    Admissible,
    /// Monte Carlo noise average against the Markovian solution.
    ValidateMc,
    /// Finite-memory coefficients and their Markov limits.
    RedfieldCoeffs,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::SingleTrace => "single-trace",
            Mode::PairLambda => "pair-lambda",
            Mode::ThetaScan => "theta-scan",
            Mode::WernerScan => "werner-scan",
            Mode::Choi => "choi",
            Mode::Admissible => "admissible",
            Mode::ValidateMc => "validate-mc",
            Mode::RedfieldCoeffs => "redfield-coeffs",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bredsim",
    about = "Two-level open-system dynamics: non-positive Markovian maps and their diagnostics",
    version
)]
struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    mode: Mode,
    /// Configuration file (flat `key = value` lines under [section] headers).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; defaults to `<mode>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed from the [run] section.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<PathBuf, String> {
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| format!("cannot read {}: {e}", cli.config.display()))?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    let body = match cli.mode {
        Mode::SingleTrace => modes::single_trace(&cfg),
        Mode::PairLambda => modes::pair_lambda(&cfg),
        Mode::ThetaScan => modes::theta_scan(&cfg),
        Mode::WernerScan => modes::werner_scan(&cfg),
        Mode::Choi => modes::choi(&cfg),
        Mode::Admissible => modes::admissible(&cfg),
        Mode::ValidateMc => modes::validate_mc(&cfg),
        Mode::RedfieldCoeffs => modes::redfield_coeffs(&cfg),
    }?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.mode.name())));
    if let Err(e) = fs::write(&out, &body) {
        // never leave a partial file behind
        let _ = fs::remove_file(&out);
        return Err(format!("cannot write {}: {e}", out.display()));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
