//! `hpqa` — HP lattice protein design and annealing analysis from the
//! command line.
//!
//! Subcommands: `enumerate` (structure census / designability databank),
//! `design` (two-step sequence design), `simulate` (Schrödinger anneal),
//! `chi` (integrator step-size diagnostic) and `noise` (control-error
//! ensembles). Every run writes its primary output plus a manifest; seeded
//! runs are bit-reproducible at any thread count.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 resource or size cap,
//! 3 solver failure.

mod commands;
mod output;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use hpqa_core::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hpqa", version, about = "HP lattice protein design on simulated annealers")]
pub(crate) struct Cli {
    /// Worker threads (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    pub(crate) threads: usize,
    /// key=value file supplying defaults for any flag of the subcommand.
    #[arg(long, global = true)]
    pub(crate) config: Option<PathBuf>,
    #[command(subcommand)]
    pub(crate) command: Command,
}

#[derive(Subcommand, Debug)]
pub(crate) enum Command {
    /// Enumerate canonical structures; optionally rank by designability.
    Enumerate(EnumerateArgs),
    /// Two-step design: optimize sequences, then filter by exact folding.
    Design(DesignArgs),
    /// Integrate the annealing Schrödinger equation and report P_g.
    Simulate(SimulateArgs),
    /// Step-size diagnostic chi(eps) over a list of resolutions.
    Chi(ChiArgs),
    /// Control-error ensembles and their sweeps.
    Noise(NoiseArgs),
}

#[derive(Args, Debug)]
pub(crate) struct EnumerateArgs {
    /// Bead count.
    #[arg(long)]
    pub(crate) n: usize,
    /// Also compute the designability ranking (slower; lower size cap).
    #[arg(long, default_value_t = false)]
    pub(crate) designability: bool,
    /// Override the size cap (census 16, designability 14 by default).
    #[arg(long)]
    pub(crate) limit: Option<usize>,
    #[arg(long, default_value = "databank.csv")]
    pub(crate) out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct TargetArgs {
    /// Structure file (line 1: move string).
    #[arg(long, conflicts_with = "target_n")]
    pub(crate) structure: Option<PathBuf>,
    /// Use the most designable n-bead structure as the target.
    #[arg(long)]
    pub(crate) target_n: Option<usize>,
    /// Cap for the designability derivation behind --target-n.
    #[arg(long, default_value_t = hpqa_core::enumerate::DEFAULT_DESIGNABILITY_LIMIT)]
    pub(crate) designability_limit: usize,
}

#[derive(Args, Debug)]
pub(crate) struct DesignArgs {
    #[command(flatten)]
    pub(crate) target: TargetArgs,
    /// Target number of H beads.
    #[arg(long)]
    pub(crate) nh: usize,
    /// Lagrange parameter (exact decimal or p/q).
    #[arg(long, default_value = "2.5")]
    pub(crate) lambda: String,
    /// exact | sa | schrodinger
    #[arg(long, default_value = "exact")]
    pub(crate) solver: String,
    /// SA restarts or Schrödinger reads.
    #[arg(long, default_value_t = 10)]
    pub(crate) budget: u64,
    #[arg(long)]
    pub(crate) seed: Option<u64>,
    /// Enumeration cap for the folding filter.
    #[arg(long, default_value_t = hpqa_core::enumerate::DEFAULT_ENUM_LIMIT)]
    pub(crate) fold_limit: usize,
    #[arg(long, default_value = "design_report.json")]
    pub(crate) out: PathBuf,
}

#[derive(Args, Debug)]
pub(crate) struct SimulateArgs {
    #[command(flatten)]
    pub(crate) target: TargetArgs,
    /// Read the problem Hamiltonian from an Ising export file instead.
    #[arg(long, conflicts_with_all = ["structure", "target_n"])]
    pub(crate) ising: Option<PathBuf>,
    #[arg(long)]
    pub(crate) nh: usize,
    #[arg(long, default_value = "1.1")]
    pub(crate) lambda: String,
    /// x | xy
    #[arg(long, default_value = "x")]
    pub(crate) driver: String,
    /// Override the driver sign: plus | minus.
    #[arg(long)]
    pub(crate) driver_sign: Option<String>,
    /// Annealing time (arbitrary units).
    #[arg(long, default_value_t = 20.0)]
    pub(crate) tf: f64,
    /// Requested step size (adjusted down to divide tf evenly).
    #[arg(long, default_value_t = 0.01)]
    pub(crate) eps: f64,
    /// Write a per-step trace CSV (t, norm, p_g, subspace_leak).
    #[arg(long)]
    pub(crate) trace: Option<PathBuf>,
    /// Sample this many reads from the final state into the report.
    #[arg(long)]
    pub(crate) reads: Option<usize>,
    #[arg(long)]
    pub(crate) seed: Option<u64>,
    #[arg(long, default_value = "simulate_report.json")]
    pub(crate) out: PathBuf,
}

#[derive(Args, Debug)]
pub(crate) struct ChiArgs {
    #[command(flatten)]
    pub(crate) target: TargetArgs,
    /// Read the problem Hamiltonian from an Ising export file instead.
    #[arg(long, conflicts_with_all = ["structure", "target_n"])]
    pub(crate) ising: Option<PathBuf>,
    #[arg(long)]
    pub(crate) nh: usize,
    #[arg(long, default_value = "1.1")]
    pub(crate) lambda: String,
    #[arg(long, default_value = "x")]
    pub(crate) driver: String,
    #[arg(long)]
    pub(crate) tf: f64,
    /// Comma-separated step sizes, at least three.
    #[arg(long)]
    pub(crate) eps_list: String,
    #[arg(long, default_value = "chi.csv")]
    pub(crate) out: PathBuf,
}

#[derive(Args, Debug)]
pub(crate) struct NoiseArgs {
    /// Structure file for a single system.
    #[arg(long, conflicts_with = "target_n")]
    pub(crate) structure: Option<PathBuf>,
    /// Read the problem Hamiltonian from an Ising export file instead.
    #[arg(long, conflicts_with_all = ["structure", "target_n"])]
    pub(crate) ising: Option<PathBuf>,
    /// Comma-separated bead counts (systems derived by designability).
    #[arg(long)]
    pub(crate) target_n: Option<String>,
    #[arg(long, default_value_t = hpqa_core::enumerate::DEFAULT_DESIGNABILITY_LIMIT)]
    pub(crate) designability_limit: usize,
    /// Comma-separated compositions, zipped with --target-n.
    #[arg(long)]
    pub(crate) nh: String,
    #[arg(long, default_value = "1.1")]
    pub(crate) lambda: String,
    /// Noise strength.
    #[arg(long, default_value_t = hpqa_core::noise::DEFAULT_NOISE_X)]
    pub(crate) x: f64,
    /// Physical qubits per logical qubit (list, zipped).
    #[arg(long, default_value = "3")]
    pub(crate) k: String,
    /// Chain strengths (list: sweep values or zipped per system).
    #[arg(long, default_value = "2.25")]
    pub(crate) jcs: String,
    #[arg(long, default_value_t = 10000)]
    pub(crate) samples: u64,
    #[arg(long)]
    pub(crate) seed: Option<u64>,
    /// jcs | n
    #[arg(long)]
    pub(crate) sweep: Option<String>,
    #[arg(long, default_value = "noise_sweep.csv")]
    pub(crate) out: PathBuf,
}

fn main() -> ExitCode {
    let argv = match output::expand_config_args(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Enumerate(args) => commands::cmd_enumerate(&cli, args),
        Command::Design(args) => commands::cmd_design(&cli, args),
        Command::Simulate(args) => commands::cmd_simulate(&cli, args),
        Command::Chi(args) => commands::cmd_chi(&cli, args),
        Command::Noise(args) => commands::cmd_noise(&cli, args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::LimitExceeded { .. }
        | Error::TooLarge { .. }
        | Error::StateTooLarge { .. }
        | Error::ComponentTooLarge { .. }
        | Error::SolverCapExceeded { .. }
        | Error::CountOverflow => 2,
        Error::CgNoConvergence { .. } => 3,
        _ => 1,
    }
}
