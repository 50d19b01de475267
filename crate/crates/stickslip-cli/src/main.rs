//! `stickslip` — command-line frontend for the friction library.
//!
//! Subcommands map one-to-one onto the library capabilities: steady-state
//! curve tabulation, presliding phase diagrams, break-away sweeps,
//! ramp-driven simulation, and parameter identification. Every run that
//! writes files also writes a manifest with the fully resolved settings, so
//! any output can be reproduced bit-identically by the same tool version.

mod commands;
mod manifest;
mod output;
mod plot;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "stickslip",
    version,
    about = "Stribeck friction with presliding hysteresis: curves, break-away sweeps, simulation, identification",
    propagate_version = true
)]
pub struct Cli {
    /// Friction parameter file (flat key-value: F_c, F_s, sigma, V, delta_exp, s).
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Output directory; tables, plots, and manifests are written there.
    /// Without it the table goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Also emit an SVG plot (requires --out).
    #[arg(long, global = true)]
    pub plot: bool,

    /// Evaluate independent grid points on this many threads
    /// (output order is unaffected).
    #[arg(long, global = true, value_name = "N")]
    pub parallel: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ChoiceArg {
    /// Use the Coulomb level F_c.
    Coulomb,
    /// Use the stiction level F_s.
    Stiction,
    /// Use the midpoint of F_c and F_s.
    Average,
    /// Solve the self-consistent fixed point.
    SelfConsistent,
}

impl From<ChoiceArg> for stickslip::SteadyStateChoice {
    fn from(c: ChoiceArg) -> Self {
        match c {
            ChoiceArg::Coulomb => Self::CoulombLevel,
            ChoiceArg::Stiction => Self::StictionLevel,
            ChoiceArg::Average => Self::Average,
            ChoiceArg::SelfConsistent => Self::SelfConsistent,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Tabulate the steady-state (Stribeck) curve over a velocity range.
    StribeckCurve(StribeckArgs),
    /// Tabulate presliding creep velocity over a (rate, distance) grid.
    PhaseDiagram(PhaseArgs),
    /// Predict break-away force over a rate grid for one or more closures.
    BreakawaySweep(SweepArgs),
    /// Integrate the ramp-driven dynamics and report break-away detection.
    Simulate(SimulateArgs),
    /// Identify friction parameters from measured data.
    Fit(FitArgs),
}

#[derive(Args)]
pub struct StribeckArgs {
    /// Lower end of the velocity range.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub v_min: f64,
    /// Upper end of the velocity range.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v_max: f64,
    /// Number of evenly spaced samples.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Args)]
pub struct PhaseArgs {
    /// Steady-state closure for the creep-velocity profile.
    #[arg(long, value_enum, default_value_t = ChoiceArg::Average)]
    pub choice: ChoiceArg,
    /// Force rates (comma-separated). Default: 0.01, 2.01, … up to 30.
    #[arg(long, value_delimiter = ',', value_name = "K,K,...")]
    pub k_grid: Option<Vec<f64>>,
    /// Smallest presliding distance of the grid.
    #[arg(long, default_value_t = 0.01)]
    pub z_min: f64,
    /// Largest presliding distance of the grid.
    #[arg(long, default_value_t = 0.99)]
    pub z_max: f64,
    /// Number of evenly spaced presliding distances.
    #[arg(long, default_value_t = 99)]
    pub z_points: usize,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Closures to sweep (comma-separated).
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_values_t = [ChoiceArg::Coulomb, ChoiceArg::Stiction, ChoiceArg::Average]
    )]
    pub choices: Vec<ChoiceArg>,
    /// Force rates (comma-separated). Default: 0.01, 2.01, … up to 30.
    #[arg(long, value_delimiter = ',', value_name = "K,K,...")]
    pub k_grid: Option<Vec<f64>>,
    /// Presliding threshold defining break-away.
    #[arg(long, default_value_t = 0.95)]
    pub z_th: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Moving mass.
    #[arg(long, default_value_t = stickslip::DEFAULT_MASS)]
    pub m: f64,
    /// Actuation force rate (input u = k·t).
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Integration step (default: resolves both model time scales).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration window (default: 3·F_s/k).
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Sign-regularization velocity scale (default: 1e-8·V).
    #[arg(long)]
    pub eps_v: Option<f64>,
    /// Presliding threshold for the primary detector.
    #[arg(long, default_value_t = 0.95)]
    pub z_th: f64,
    /// Enable the secondary velocity detector at this threshold.
    #[arg(long)]
    pub v_th_detect: Option<f64>,
    /// Keep integrating to t_end after detection.
    #[arg(long)]
    pub run_to_end: bool,
    /// Record every n-th step into the trajectory
    /// (default: decimate long runs to about 200k rows).
    #[arg(long)]
    pub sample_every: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    /// Fit the steady-state curve to (v, F) data.
    Stribeck,
    /// Fit the Average-closure break-away curve to (k, F_ba) data.
    Breakaway,
}

#[derive(Args)]
pub struct FitArgs {
    /// Two-column comma-separated data file.
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Which model to fit. The --params file provides the initial guess.
    #[arg(long, value_enum, default_value_t = FitMode::Stribeck)]
    pub mode: FitMode,
    /// Presliding threshold (breakaway mode only).
    #[arg(long, default_value_t = 0.95)]
    pub z_th: f64,
    /// Also fit the Stribeck shape exponent.
    #[arg(long)]
    pub fit_delta_exp: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
