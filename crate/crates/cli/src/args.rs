use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer};

#[derive(Debug, Parser)]
#[command(
    name = "dipolar",
    version,
    about = "Phase gates between polar molecules: error budgets, gate dynamics, hyperfine tables, feasibility"
)]
pub struct Cli {
    /// Output format (default: table).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geometry-induced phase error: analytic sensitivities against Monte Carlo.
    PhaseError(PhaseErrorArgs),
    /// Simulate a gate sequence and print the computational-basis map.
    Gate(GateArgs),
    /// Order-of-magnitude estimates for one scenario, compared with reference values.
    Feasibility(FeasibilityArgs),
    /// Hyperfine levels of the ground vibronic state.
    Hyperfine(HyperfineArgs),
    /// Evaluate a gate or feasibility quantity on a 1-D grid.
    Sweep(SweepArgs),
    /// Run the acceptance suite and print one line per criterion.
    Reproduce(ReproduceArgs),
    /// Execute a JSON run configuration.
    Run(RunArgs),
}

/// A run configuration file: one command plus output settings.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Seed for commands that sample; a seed inside the command wins.
    #[serde(default)]
    pub seed: Option<u64>,
    pub command: ConfigCommand,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConfigCommand {
    PhaseError(PhaseErrorArgs),
    Gate(GateArgs),
    Feasibility(FeasibilityArgs),
    Hyperfine(HyperfineArgs),
    Sweep(SweepArgs),
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct PhaseErrorArgs {
    /// Molecule preset (default: co).
    #[arg(long)]
    pub preset: Option<String>,
    /// Dipole moment of both molecules, e.g. 1.37D (default: the preset's polar state).
    #[arg(long)]
    pub mu: Option<String>,
    /// Mean separation, e.g. 500nm (default: half the preset's lattice wavelength).
    #[arg(long)]
    pub r: Option<String>,
    /// RMS spread of the separation, e.g. 1.5nm.
    #[arg(long)]
    pub sigma_r: Option<String>,
    /// RMS spread of θ (bare numbers are radians; `3deg` accepted).
    #[arg(long)]
    pub sigma_theta: Option<String>,
    #[arg(long)]
    pub sigma_theta1: Option<String>,
    #[arg(long)]
    pub sigma_theta2: Option<String>,
    #[arg(long)]
    pub sigma_phi2: Option<String>,
    /// Monte-Carlo samples per estimate (default: 100000).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative phase error budget (default: 0.01).
    #[arg(long)]
    pub target: Option<f64>,
    /// Lattice depth in recoil energies; adds the lattice width estimate.
    #[arg(long)]
    pub lattice_depth: Option<f64>,
    /// Separation in lattice periods (default: 1).
    #[arg(long)]
    pub periods: Option<u32>,
    /// Lattice wavelength (default: the preset's).
    #[arg(long)]
    pub wavelength: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    #[default]
    Direct,
    Inverted,
    Rotational,
}

impl fmt::Display for SchemeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeArg::Direct => "direct",
            SchemeArg::Inverted => "inverted",
            SchemeArg::Rotational => "rotational",
        })
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct GateArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Molecule preset (default: co, lics or bai by scheme).
    #[arg(long)]
    pub preset: Option<String>,
    /// Separation of the pair.
    #[arg(long)]
    pub r: Option<String>,
    /// Trap height above the wire (rotational scheme).
    #[arg(long)]
    pub h: Option<String>,
    /// Blockade shift in rad/s, or `inf` for ideal blockade.
    #[arg(long)]
    pub u: Option<String>,
    /// Shift of the |e⟩|1′⟩ configuration (inverted scheme), rad/s.
    #[arg(long)]
    pub u_e1: Option<String>,
    /// Rabi frequency of all pulses; bare numbers are rad/s.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub omega_pi: Option<String>,
    #[arg(long)]
    pub omega_2pi: Option<String>,
    /// Inverted scheme: Φ_c = Φ_t = Φ̃_t (`pi`, `pi/2`, `2pi` or radians).
    #[arg(long)]
    pub phases: Option<String>,
    #[arg(long)]
    pub phi_ct: Option<String>,
    #[arg(long)]
    pub phi_tilde: Option<String>,
    /// Apply the sequence this many times.
    #[arg(long)]
    pub repeat: Option<usize>,
    /// Include radiative loss from the excited level.
    #[arg(long)]
    pub decay: bool,
    /// Efficiency of the |1⟩ ↔ |1′⟩ transfers (inverted scheme).
    #[arg(long)]
    pub transfer_efficiency: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct FeasibilityArgs {
    /// Molecule preset (default: the scenario's).
    #[arg(long)]
    pub preset: Option<String>,
    /// direct-lattice, inverted-lattice or rotational-trap.
    #[arg(long)]
    pub scenario: String,
    /// Override one input, e.g. `--set r=200nm`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    #[serde(deserialize_with = "assignments")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct HyperfineArgs {
    /// Molecule preset (default: bai).
    #[arg(long)]
    pub preset: Option<String>,
    /// Highest rotational level (default: 2).
    #[arg(long)]
    pub nmax: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    #[default]
    Gate,
    Feasibility,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SweepKind>,
    /// Swept parameter: `u` or `omega` for gate sweeps, any input name for feasibility.
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
    /// Gate sweeps: fixed Rabi frequency, rad/s (default: 1e5).
    #[arg(long)]
    pub omega: Option<String>,
    /// Gate sweeps: fixed blockade shift, rad/s (default: the preset's nearest-neighbour shift).
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Feasibility sweeps: scenario.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Feasibility sweeps: unit of the grid values (default: the input's own unit).
    #[arg(long)]
    pub unit: Option<String>,
    /// Feasibility sweeps: fixed overrides, e.g. `--set r=200nm`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    #[serde(deserialize_with = "assignments")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples per estimate.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random pulse sequences for the norm check.
    #[arg(long)]
    pub sequences: Option<usize>,
    /// Run a single criterion.
    #[arg(long)]
    pub criterion: Option<u8>,
    /// Exit with status 1 if any check fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Path to the JSON configuration.
    pub config: PathBuf,
}

/// Accept overrides either as `["k=v", ...]` or as `{"k": "v", ...}`.
fn assignments<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        List(Vec<String>),
        Map(BTreeMap<String, String>),
    }
    Ok(match Form::deserialize(d)? {
        Form::List(v) => v,
        Form::Map(m) => m.into_iter().map(|(k, v)| format!("{k}={v}")).collect(),
    })
}
