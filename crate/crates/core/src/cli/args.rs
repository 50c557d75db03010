use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use super::config::OutputFormat;
use crate::holonomy::DEFAULT_STEPS;

#[derive(Debug, Parser)]
#[command(name = "holonomy-lab", version, about = "Holonomic gates in Λ systems: construction, holonomies, decay sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a gate matrix.
    #[command(subcommand)]
    Gate(GateCommand),
    /// Compute the holonomy of one or more loops.
    Holonomy(HolonomyArgs),
    /// Run a fidelity sweep from a JSON config.
    Sweep(SweepArgs),
    /// Run any experiment described by a JSON config.
    Run(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum GateCommand {
    /// The single-loop gate n·σ.
    OneQubit(AnglesArgs),
    /// Loop n followed by loop m, each given as `X,Y,Z`.
    Compose {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        n: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        m: Vec<f64>,
    },
    /// The two-ion gate on |00⟩, |01⟩, |10⟩, |11⟩.
    TwoQubit(AnglesArgs),
    /// Two loops reproducing a 2×2 unitary up to a global phase.
    Synthesize {
        /// JSON matrix, inline or as a file path.
        #[arg(long)]
        target: String,
    },
}

#[derive(Debug, Args)]
pub struct AnglesArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseKind {
    Square,
    Sech,
    SechRenormalized,
}

#[derive(Debug, Args)]
pub struct HolonomyArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Use the two-ion register.
    #[arg(long)]
    pub two_qubit: bool,
    #[arg(long, value_enum, default_value_t = PulseKind::Square)]
    pub pulse: PulseKind,
    /// Square amplitude or sech rate β.
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
    /// Pulse area; defaults to π.
    #[arg(long, allow_negative_numbers = true)]
    pub area: Option<f64>,
    /// Time steps along each loop.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub grid: usize,
    /// Further loops as `THETA,PHI`, traversed in order after the first.
    #[arg(long, allow_negative_numbers = true)]
    pub compose: Vec<String>,
    /// Read the loop from a JSON config instead of flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Overrides the config's output path; `-` writes to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker count (0 = one per core); overrides HOLONOMY_LAB_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
}
