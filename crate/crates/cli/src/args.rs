use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Envelope-theory energies and critical coupling constants.
///
/// Units are natural with hbar = 1: masses, couplings and the inverse range
/// mu are plain numbers. Wells are `yukawa`, `exponential`, `gaussian`,
/// `power:P`, or an expression in `r` such as `exp(-r^2)/(1+r)`.
#[derive(Debug, Parser)]
#[command(name = "etcrit", version, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub output: Format,

    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Critical coupling for N identical particles.
    #[command(args_override_self = true)]
    CritId(CritIdArgs),
    /// Energy of N identical particles at coupling g.
    #[command(args_override_self = true)]
    EnergyId(EnergyIdArgs),
    /// Critical g_aa or g_ab for Na particles a plus one particle b.
    #[command(args_override_self = true)]
    CritMixed(CritMixedArgs),
    /// Energy of Na particles a plus one particle b.
    #[command(args_override_self = true)]
    EnergyMixed(EnergyMixedArgs),
    /// Two-body radial Schroedinger solver.
    #[command(args_override_self = true)]
    Oracle(OracleArgs),
    /// Repeat another command over a grid of flag values.
    Scan(ScanArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

impl Command {
    pub const NAMES: [&'static str; 7] = [
        "crit-id",
        "energy-id",
        "crit-mixed",
        "energy-mixed",
        "oracle",
        "scan",
        "validate",
    ];
}

#[derive(Debug, Clone, Args)]
pub struct WellArgs {
    #[arg(long, default_value = "exponential")]
    pub well: String,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct IdStateArgs {
    #[arg(long = "N", default_value_t = 2)]
    pub n_particles: usize,
    #[arg(long = "D", default_value_t = 3)]
    pub dim: u32,
    /// `ground` or `(n,l);(n,l);...` with N - 1 pairs.
    #[arg(long, default_value = "ground")]
    pub state: String,
    /// Radial quantum number of a two-body state; replaces --state.
    #[arg(long = "n")]
    pub n_radial: Option<u32>,
    /// Orbital quantum number of a two-body state; replaces --state.
    #[arg(long = "l")]
    pub l: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdMethod {
    Plain,
    Improved,
    /// Numerical two-body solution; needs N = 2.
    Oracle,
}

#[derive(Debug, Clone, Args)]
pub struct CritIdArgs {
    #[command(flatten)]
    pub well: WellArgs,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[command(flatten)]
    pub state: IdStateArgs,
    #[arg(long, value_enum, default_value_t = IdMethod::Plain)]
    pub method: IdMethod,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyIdArgs {
    #[command(flatten)]
    pub well: WellArgs,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long)]
    pub g: f64,
    #[command(flatten)]
    pub state: IdStateArgs,
    #[arg(long, value_enum, default_value_t = IdMethod::Plain)]
    pub method: IdMethod,
}

#[derive(Debug, Clone, Args)]
pub struct MixedArgs {
    #[arg(long = "Na")]
    pub na: usize,
    #[arg(long, default_value_t = 1.0)]
    pub ma: f64,
    /// Mass of b; `inf` for a static source.
    #[arg(long, visible_alias = "m", default_value = "1")]
    pub mb: String,
    #[arg(long, default_value = "exponential")]
    pub well_aa: String,
    #[arg(long, default_value = "exponential")]
    pub well_ab: String,
    /// Inverse range of both wells.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub mu_aa: Option<f64>,
    #[arg(long)]
    pub mu_ab: Option<f64>,
    #[arg(long = "D", default_value_t = 3)]
    pub dim: u32,
    /// State of the a particles: `ground` or Na - 1 pairs `(n,l)`.
    #[arg(long, default_value = "ground")]
    pub state_a: String,
    /// State of the a cluster relative to b: `ground` or one pair `(n,l)`.
    #[arg(long, default_value = "ground")]
    pub state_b: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coupling {
    Gaa,
    Gab,
}

#[derive(Debug, Clone, Args)]
pub struct CritMixedArgs {
    #[command(flatten)]
    pub mixed: MixedArgs,
    #[arg(long, visible_alias = "g")]
    pub gaa: Option<f64>,
    #[arg(long, visible_alias = "h")]
    pub gab: Option<f64>,
    /// Held coupling as `gaa=VALUE` or `gab=VALUE`.
    #[arg(long)]
    pub hold: Option<String>,
    /// Coupling to solve for; inferred when only one coupling is given.
    #[arg(long, value_enum)]
    pub solve: Option<Coupling>,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyMixedArgs {
    #[command(flatten)]
    pub mixed: MixedArgs,
    #[arg(long, visible_alias = "g")]
    pub gaa: f64,
    #[arg(long, visible_alias = "h")]
    pub gab: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Energy,
    Critical,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub well: WellArgs,
    /// Coefficient of `-u''`, that is hbar^2 / (2 reduced mass).
    #[arg(long, default_value_t = 1.0)]
    pub kinetic: f64,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Coupling; required in energy mode.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, value_enum, default_value_t = OracleMode::Energy)]
    pub mode: OracleMode,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// `NAME=a,b,c` or `NAME=start:stop:step`; NAME is a flag of the scanned
    /// command. Repeat for a cartesian product.
    #[arg(long, required = true)]
    pub vary: Vec<String>,
    /// The scanned command and its fixed flags.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, required = true)]
    pub command: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Scale the reference constants of one criterion: `ID=RELATIVE`.
    #[arg(long)]
    pub perturb: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}
