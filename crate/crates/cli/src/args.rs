use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "stencilmat",
    version,
    about = "Finite-difference advection schemes as Sylvester matrix equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Analyze,
    Sweep,
    Bound,
    Oracle,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Solve => "solve",
            CommandKind::Analyze => "analyze",
            CommandKind::Sweep => "sweep",
            CommandKind::Bound => "bound",
            CommandKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the matrix equation and compare it with time marching.
    Solve(RunArgs),
    /// Report uniqueness, invertibility, nilpotency, spectra and the error bound.
    Analyze(RunArgs),
    /// L2 error per time level of a time-marched sinusoid for several CFL numbers.
    Sweep(RunArgs),
    /// Closed-form Lax error bound over a list of CFL numbers.
    Bound(RunArgs),
    /// Bartels-Stewart against the Kronecker solve on seeded random instances.
    Oracle(RunArgs),
}

impl Command {
    pub fn split(&self) -> (CommandKind, &RunArgs) {
        match self {
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Analyze(a) => (CommandKind::Analyze, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
            Command::Bound(a) => (CommandKind::Bound, a),
            Command::Oracle(a) => (CommandKind::Oracle, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// leapfrog, lax, lax-wendroff, crank-nicolson or custom.
    #[arg(long, default_value = "lax")]
    pub scheme: String,

    /// Nine weights α,β,γ,δ,ε,ζ,η,θ,ϑ for --scheme custom.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Option<Vec<f64>>,

    /// Number of space intervals (nodes 0..=nx).
    #[arg(long)]
    pub nx: Option<usize>,

    /// Number of time steps.
    #[arg(long)]
    pub nt: Option<usize>,

    /// Advection speed.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,

    /// Domain length; h = length / nx.
    #[arg(long, conflicts_with_all = ["h", "tau"])]
    pub length: Option<f64>,

    /// CFL number(s); τ = cfl·h/c. Repeat or comma-separate for sweep and bound.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["horizon", "tau"])]
    pub cfl: Vec<f64>,

    /// Final time; τ = horizon / nt.
    #[arg(long, conflicts_with_all = ["h", "tau"])]
    pub horizon: Option<f64>,

    /// Space step (with --tau).
    #[arg(long, requires = "tau")]
    pub h: Option<f64>,

    /// Time step (with --h).
    #[arg(long, requires = "h")]
    pub tau: Option<f64>,

    /// Wavelength of the advected cosine.
    #[arg(long, default_value_t = 1.0)]
    pub wavelength: f64,

    /// Output CSV path (default: <command>.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Agreement tolerance (solve: 1e-8, oracle: 1e-9).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Seed for the oracle's random instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of oracle instances.
    #[arg(long, default_value_t = 50)]
    pub cases: usize,

    /// Largest oracle matrix dimension.
    #[arg(long, default_value_t = 16)]
    pub max_size: usize,
}
