mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

const AFTER_HELP: &str = "\
Exit status:
  0  success
  1  I/O failure (unreadable input, malformed file, refusing to overwrite)
  2  validation failure (input outside its class, rejected shift, bad arguments)
  3  numerical failure (insufficient resolution, unresolved contour, no convergence)

Environment:
  DIRAC_RES_THREADS  maximum number of worker threads";

#[derive(Debug, Parser)]
#[command(name = "dirac-res", version, about = "Resonances and inverse problems for half-line Dirac operators", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Half-width of the real frequency grid.
    #[arg(long = "kmax", global = true, default_value_t = 200.0)]
    pub k_max: f64,
    /// Number of frequency samples (a power of two).
    #[arg(long = "nk", global = true, default_value_t = 16384)]
    pub n_k: usize,
    /// Main tolerance of the command (finder acceptance, reconstruction step, ...).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for pseudorandom sampling.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Replace existing output files.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub overwrite: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Jost function and S-matrix of a potential.
    Forward(commands::ForwardArgs),
    /// Zeros of a Jost function in a rectangle of the lower half-plane.
    Resonances(commands::ResonanceArgs),
    /// Move finitely many zeros of a Jost function.
    Perturb(commands::PerturbArgs),
    /// Recover a potential from a Jost function.
    Reconstruct(commands::ReconstructArgs),
    /// Check that a file holds a Jost function.
    Verify(commands::VerifyArgs),
    /// Hermite-Biehler function of a Jost function, with the defining inequality checked.
    Hb(commands::HbArgs),
    /// Resonance counting function as CSV.
    Counting(commands::CountingArgs),
    /// Distance of reconstructed potentials as the shifts shrink, as CSV.
    Stability(commands::StabilityArgs),
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DIRAC_RES_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("DIRAC_RES_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("DIRAC_RES_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Forward(a) => commands::forward(g, a),
        Command::Resonances(a) => commands::resonances(g, a),
        Command::Perturb(a) => commands::perturb(g, a),
        Command::Reconstruct(a) => commands::reconstruct(g, a),
        Command::Verify(a) => commands::verify(g, a),
        Command::Hb(a) => commands::hb(g, a),
        Command::Counting(a) => commands::counting(g, a),
        Command::Stability(a) => commands::stability(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error [{}]: {}", f.stage, f.message);
            ExitCode::from(f.code)
        }
    }
}
