//! Closed-form feasibility estimates and scenario reports.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dynamics::{gate_time, gate_time_from_durations, pi_duration, two_pi_duration};
use crate::error::{invalid, Error, Result};
use crate::geometry::LatticeConfig;
use crate::molecules::{self, dressed_states, rotational_linewidth, stark_mixing_field, MoleculeParams};
use crate::units::{consts, convert, field_from_rabi, field_to_intensity, Dimension, Quantity, Unit};

fn positive(q: Quantity, dim: Dimension, name: &'static str) -> Result<f64> {
    let v = q.cgs(dim)?;
    if !(v > 0.0) {
        return Err(invalid(name, "must be positive"));
    }
    Ok(v)
}

/// u = µ₁µ₂/(r³ħ).
pub fn dipole_dipole_shift(mu1: Quantity, mu2: Quantity, r: Quantity) -> Result<Quantity> {
    let m1 = mu1.cgs(Dimension::DipoleMoment)?;
    let m2 = mu2.cgs(Dimension::DipoleMoment)?;
    let r = positive(r, Dimension::Length, "r")?;
    Quantity::new(m1 * m2 / (r.powi(3) * consts::HBAR), Unit::RadPerSecond)
}

/// V = µ²/(h²rħ) for two traps joined by a wire.
pub fn trap_dipole_shift(mu: Quantity, h: Quantity, r: Quantity) -> Result<Quantity> {
    let m = mu.cgs(Dimension::DipoleMoment)?;
    let h = positive(h, Dimension::Length, "h")?;
    let r = positive(r, Dimension::Length, "r")?;
    Quantity::new(m * m / (h * h * r * consts::HBAR), Unit::RadPerSecond)
}

/// µ𝓔/ħ.
pub fn dc_phase_rate(mu: Quantity, field: Quantity) -> Result<Quantity> {
    let m = mu.cgs(Dimension::DipoleMoment)?;
    let e = field.cgs(Dimension::ElectricField)?;
    Quantity::new(m * e / consts::HBAR, Unit::RadPerSecond)
}

pub type Site = [i64; 3];

/// Phases accumulated by the control/target pair during the 2π pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticePhases {
    /// Control, rad.
    pub phi_c: f64,
    /// Target, rad.
    pub phi_t: f64,
    /// Target with the control excited, rad.
    pub phi_t_tilde: f64,
    /// Σ µ²T/(r³ħ) over spectators of the target, rad.
    pub lattice_term_t: f64,
    /// µ𝓔T/ħ, rad.
    pub dc_term: f64,
}

fn site_distance(a: Site, b: Site, spacing: f64) -> f64 {
    let d2: i64 = (0..3).map(|k| (a[k] - b[k]).pow(2)).sum();
    (d2 as f64).sqrt() * spacing
}

/// Lattice sums and static-field phases for occupied sites (integer
/// coordinates in units of λ/2). `pair` is (control, target). All times
/// are the 2π-pulse duration `t`.
pub fn lattice_phase_sum(
    mu: Quantity,
    lattice: &LatticeConfig,
    sites: &[Site],
    e_dc: Quantity,
    t: Quantity,
    mu_e: Quantity,
    pair: (Site, Site),
) -> Result<LatticePhases> {
    lattice.validate()?;
    let m = mu.cgs(Dimension::DipoleMoment)?;
    let me = mu_e.cgs(Dimension::DipoleMoment)?;
    let e = e_dc.cgs(Dimension::ElectricField)?;
    let t = t.cgs(Dimension::Time)?;
    if t < 0.0 {
        return Err(invalid("t", "must be non-negative"));
    }
    let mut seen = HashSet::with_capacity(sites.len());
    for s in sites {
        if !seen.insert(*s) {
            return Err(Error::OverlappingSites(*s));
        }
    }
    let (c, tg) = pair;
    if c == tg {
        return Err(Error::OverlappingSites(c));
    }
    if !seen.contains(&c) || !seen.contains(&tg) {
        return Err(invalid("pair", "control and target sites must be occupied"));
    }
    let spacing = lattice.wavelength / 2.0;
    let k = m * m * t / consts::HBAR;
    let sum_for = |x: Site| -> f64 {
        sites.iter().filter(|&&j| j != c && j != tg).map(|&j| k / site_distance(x, j, spacing).powi(3)).sum()
    };
    let (sc, st) = (sum_for(c), sum_for(tg));
    let dc = m * e * t / consts::HBAR;
    let pair_term = k / site_distance(c, tg, spacing).powi(3);
    Ok(LatticePhases {
        phi_c: sc + dc,
        phi_t: st + dc,
        phi_t_tilde: st - pair_term + dc + me * e * t / consts::HBAR,
        lattice_term_t: st,
        dc_term: dc,
    })
}

/// How the tolerable phase error is stated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseBudget {
    /// Absolute phase uncertainty in rad.
    Absolute(f64),
    /// Fraction of π.
    FractionOfPi(f64),
}

impl Default for PhaseBudget {
    fn default() -> Self {
        PhaseBudget::Absolute(0.01)
    }
}

impl PhaseBudget {
    pub fn radians(self) -> f64 {
        match self {
            PhaseBudget::Absolute(x) => x,
            PhaseBudget::FractionOfPi(x) => x * PI,
        }
    }
}

/// Δ𝓔 = δφ·ħ/(µT).
pub fn field_precision(mu: Quantity, t: Quantity, budget: PhaseBudget) -> Result<Quantity> {
    let m = positive(mu, Dimension::DipoleMoment, "mu")?;
    let t = positive(t, Dimension::Time, "t")?;
    let dphi = budget.radians();
    if !(dphi >= 0.0) || !dphi.is_finite() {
        return Err(invalid("delta_phi", "must be non-negative"));
    }
    Quantity::new(dphi * consts::HBAR / (m * t), Unit::StatvoltPerCm)
}

/// ⌊T_coh/T_gate⌋.
pub fn ops_count(coherence: Quantity, gate_time: Quantity) -> Result<u64> {
    let a = positive(coherence, Dimension::Time, "coherence")?;
    let b = positive(gate_time, Dimension::Time, "gate_time")?;
    Ok((a / b).floor() as u64)
}

/// Lowest wire mode ω = πv/r.
pub fn wire_min_frequency(r: Quantity, v: Quantity) -> Result<Quantity> {
    wire_frequency(1, r, v)
}

/// Wire mode ω = nπv/r.
pub fn wire_frequency(n: u32, r: Quantity, v: Quantity) -> Result<Quantity> {
    let r = positive(r, Dimension::Length, "r")?;
    let v = positive(v, Dimension::Velocity, "v")?;
    if v > consts::C * (1.0 + 1e-12) {
        return Err(invalid("v", "cannot exceed the speed of light"));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    Quantity::new(n as f64 * PI * v / r, Unit::RadPerSecond)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    DirectLattice,
    InvertedLattice,
    RotationalTrap,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::DirectLattice, Scenario::InvertedLattice, Scenario::RotationalTrap];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DirectLattice => "direct-lattice",
            Scenario::InvertedLattice => "inverted-lattice",
            Scenario::RotationalTrap => "rotational-trap",
        }
    }

    /// Preset the scenario defaults are tuned to.
    pub fn default_preset(self) -> &'static str {
        match self {
            Scenario::DirectLattice => "CO-13",
            Scenario::InvertedLattice => "LiCs",
            Scenario::RotationalTrap => "BaI",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|x| x.name() == s.trim().to_ascii_lowercase()).ok_or_else(|| {
            invalid("scenario", format!("`{s}` is not one of direct-lattice, inverted-lattice, rotational-trap"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tolerance {
    Relative(f64),
    /// Within a factor of ten.
    OrderOfMagnitude,
    Exact,
}

impl Tolerance {
    pub fn accepts(self, value: f64, expected: f64) -> bool {
        match self {
            Tolerance::Relative(t) => ((value - expected) / expected).abs() <= t,
            Tolerance::Exact => ((value - expected) / expected).abs() <= 1e-9,
            Tolerance::OrderOfMagnitude => {
                value.signum() == expected.signum() && (value / expected).log10().abs() < 1.0
            }
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(t) => write!(f, "±{}%", t * 100.0),
            Tolerance::OrderOfMagnitude => f.write_str("×10"),
            Tolerance::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedEntry {
    pub scenario: Scenario,
    pub preset: String,
    pub row: String,
    pub label: String,
    pub value: f64,
    pub unit: Unit,
    pub tolerance: Tolerance,
}

impl ExpectedEntry {
    pub fn quantity(&self) -> Result<Quantity> {
        Quantity::new(self.value, self.unit)
    }
}

#[derive(Debug, Deserialize)]
struct ExpectedFile {
    version: u32,
    entries: Vec<ExpectedEntry>,
}

const EXPECTED_DATA: &str = include_str!("../data/expected.json");

/// Reference values shipped with the crate.
pub fn expected_values() -> &'static [ExpectedEntry] {
    static E: OnceLock<Vec<ExpectedEntry>> = OnceLock::new();
    E.get_or_init(|| {
        let f: ExpectedFile = serde_json::from_str(EXPECTED_DATA).expect("shipped expected values parse");
        assert_eq!(f.version, 1, "unsupported expected-values version");
        f.entries
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    /// In the row's unit.
    pub value: f64,
    pub tolerance: Tolerance,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub value: f64,
    pub unit: Unit,
    pub formula: String,
    pub inputs: BTreeMap<String, Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within: Option<bool>,
}

impl ReportRow {
    pub fn quantity(&self) -> Result<Quantity> {
        Quantity::new(self.value, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub preset: String,
    pub scenario: Scenario,
    pub inputs: BTreeMap<String, Quantity>,
    pub rows: Vec<ReportRow>,
}

impl FeasibilityReport {
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Rows that carry a reference value but fall outside its tolerance.
    pub fn outside(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.within == Some(false))
    }
}

type Inputs = BTreeMap<String, Quantity>;

struct Builder {
    preset: String,
    scenario: Scenario,
    inputs: Inputs,
    rows: Vec<ReportRow>,
}

impl Builder {
    fn get(&self, key: &str) -> Quantity {
        self.inputs[key]
    }

    fn push(&mut self, name: &str, q: Quantity, unit: Unit, formula: &str, keys: &[&str]) -> Result<()> {
        let value = convert(q, unit)?.value();
        let inputs = keys.iter().map(|k| (k.to_string(), self.inputs[*k])).collect();
        let entry = expected_values()
            .iter()
            .find(|e| e.scenario == self.scenario && e.row == name && e.preset.eq_ignore_ascii_case(&self.preset));
        let (expected, rel_deviation, within) = match entry {
            Some(e) => {
                let ev = convert(e.quantity()?, unit)?.value();
                let exp = Expected { value: ev, tolerance: e.tolerance, label: e.label.clone() };
                (Some(exp), Some((value - ev) / ev), Some(e.tolerance.accepts(value, ev)))
            }
            None => (None, None, None),
        };
        self.rows.push(ReportRow {
            name: name.to_string(),
            value,
            unit,
            formula: formula.to_string(),
            inputs,
            expected,
            rel_deviation,
            within,
        });
        Ok(())
    }

    fn push_count(&mut self, name: &str, n: u64, formula: &str, keys: &[&str]) -> Result<()> {
        self.push(name, Quantity::new(n as f64, Unit::Unitless)?, Unit::Unitless, formula, keys)
    }
}

fn q(v: f64, u: Unit) -> Quantity {
    Quantity::new(v, u).expect("finite default")
}

fn required(m: &MoleculeParams, p: Option<molecules::Param>, scenario: Scenario) -> Result<Quantity> {
    p.map(|p| p.quantity)
        .ok_or_else(|| Error::IncompatibleScenario { scenario: scenario.name().into(), preset: m.name.clone() })
}

fn abs_dipole(q: Quantity) -> Quantity {
    Quantity::new(q.value().abs(), q.unit()).expect("finite")
}

/// Default inputs for a scenario, filled from the preset.
pub fn scenario_defaults(m: &MoleculeParams, scenario: Scenario) -> Result<Inputs> {
    let mut d = Inputs::new();
    let mut set = |k: &str, v: Quantity| {
        d.insert(k.to_string(), v);
    };
    set("coherence", q(1.0, Unit::Second));
    match scenario {
        Scenario::DirectLattice => {
            let lam = required(m, m.lattice_wavelength, scenario)?;
            let half = Quantity::from_base(lam.base_value() / 2.0, Dimension::Length)?;
            set("mu_excited", abs_dipole(required(m, m.mu_excited, scenario)?));
            set("mu_transition", required(m, m.mu_transition_induced, scenario)?);
            set("r", convert(half, Unit::Nanometer)?);
            set("r_far", convert(Quantity::from_base(5.0 * half.base_value(), Dimension::Length)?, Unit::Nanometer)?);
            set("omega_transfer", q(6e4, Unit::RadPerSecond));
            set("omega_pi", q(1e5, Unit::RadPerSecond));
            set("omega_2pi", q(1e5, Unit::RadPerSecond));
            set("omega_far", q(2e3, Unit::RadPerSecond));
        }
        Scenario::InvertedLattice => {
            let lam = required(m, m.lattice_wavelength, scenario)?;
            let half = Quantity::from_base(lam.base_value() / 2.0, Dimension::Length)?;
            set("mu_ground", abs_dipole(m.mu_ground.quantity));
            set("mu_excited", abs_dipole(required(m, m.mu_excited, scenario)?));
            set("mu_transition", required(m, m.mu_transition_induced, scenario)?);
            set("rotational_constant", required(m, m.rotational_constant, scenario)?);
            set("r", convert(half, Unit::Nanometer)?);
            set("omega_pi", q(6e4, Unit::RadPerSecond));
            set("omega_2pi", q(1e5, Unit::RadPerSecond));
            set("t_field", q(100.0, Unit::Microsecond));
            set("delta_phi", q(0.01, Unit::Radian));
        }
        Scenario::RotationalTrap => {
            set("mu", abs_dipole(m.mu_ground.quantity));
            set("rotational_constant", required(m, m.rotational_constant, scenario)?);
            set("h", q(0.1, Unit::Micrometer));
            set("r", q(10.0, Unit::Micrometer));
            set("omega_coupl_control", q(3e7, Unit::RadPerSecond));
            set("omega_coupl_target", q(3e6, Unit::RadPerSecond));
            set("omega_pi", q(3e5, Unit::RadPerSecond));
            set("omega_2pi", q(2e4, Unit::RadPerSecond));
            set("wire_velocity", q(consts::C, Unit::CmPerSecond));
        }
    }
    Ok(d)
}

/// Compute every estimate of a scenario for a preset. Overrides replace
/// named inputs and must match their dimension.
pub fn feasibility_report(
    preset_name: &str,
    scenario: Scenario,
    overrides: &BTreeMap<String, Quantity>,
) -> Result<FeasibilityReport> {
    let m = molecules::preset(preset_name)?;
    let mut inputs = scenario_defaults(&m, scenario)?;
    for (k, v) in overrides {
        let slot = inputs.get_mut(k).ok_or_else(|| Error::UnknownOverride(k.clone()))?;
        if slot.dimension() != v.dimension() {
            return Err(Error::DimensionMismatch { expected: slot.dimension(), found: v.dimension() });
        }
        *slot = *v;
    }
    let mut b = Builder { preset: m.name.clone(), scenario, inputs, rows: Vec::new() };
    match scenario {
        Scenario::DirectLattice => direct_rows(&mut b)?,
        Scenario::InvertedLattice => inverted_rows(&mut b)?,
        Scenario::RotationalTrap => rotational_rows(&mut b)?,
    }
    Ok(FeasibilityReport { preset: b.preset, scenario, inputs: b.inputs, rows: b.rows })
}

fn direct_rows(b: &mut Builder) -> Result<()> {
    use Unit::*;
    let u = dipole_dipole_shift(b.get("mu_excited"), b.get("mu_excited"), b.get("r"))?;
    b.push("u_neighbour", u, RadPerSecond, "u = µ²/(r³ħ)", &["mu_excited", "r"])?;
    let tp = pi_duration(b.get("omega_transfer"))?;
    b.push("t_pi_transfer", tp, Microsecond, "T_π = π/Ω", &["omega_transfer"])?;
    let e = field_from_rabi(b.get("mu_transition"), b.get("omega_transfer"))?;
    b.push("field_transfer", e, VoltPerCm, "E = ħΩ/µ", &["mu_transition", "omega_transfer"])?;
    b.push(
        "intensity_transfer",
        field_to_intensity(e)?,
        WattPerCm2,
        "I = cE²/4π",
        &["mu_transition", "omega_transfer"],
    )?;
    let ratio = u.base_value() / b.get("omega_2pi").cgs(Dimension::AngularFrequency)?;
    b.push("blockade_ratio", q(ratio, Unitless), Unitless, "u/Ω_2π", &["mu_excited", "r", "omega_2pi"])?;
    let tg = gate_time(b.get("omega_pi"), b.get("omega_2pi"))?;
    b.push("gate_time", tg, Microsecond, "T = 2π/Ω_π + 2π/Ω_2π", &["omega_pi", "omega_2pi"])?;
    b.push_count(
        "ops_count",
        ops_count(b.get("coherence"), tg)?,
        "⌊T_coh/T⌋",
        &["coherence", "omega_pi", "omega_2pi"],
    )?;
    let uf = dipole_dipole_shift(b.get("mu_excited"), b.get("mu_excited"), b.get("r_far"))?;
    b.push("u_far", uf, RadPerSecond, "u = µ²/(r³ħ)", &["mu_excited", "r_far"])?;
    let tf = gate_time(b.get("omega_far"), b.get("omega_far"))?;
    b.push("gate_time_far", tf, Millisecond, "T = 2π/Ω_π + 2π/Ω_2π", &["omega_far"])?;
    b.push_count("ops_count_far", ops_count(b.get("coherence"), tf)?, "⌊T_coh/T⌋", &["coherence", "omega_far"])?;
    Ok(())
}

fn inverted_rows(b: &mut Builder) -> Result<()> {
    use Unit::*;
    let u = dipole_dipole_shift(b.get("mu_ground"), b.get("mu_ground"), b.get("r"))?;
    b.push("u_gg", u, RadPerSecond, "u = µ²/(r³ħ)", &["mu_ground", "r"])?;
    let ue1 = dipole_dipole_shift(b.get("mu_ground"), b.get("mu_excited"), b.get("r"))?;
    b.push("u_e1", ue1, RadPerSecond, "u = µµ_e/(r³ħ)", &["mu_ground", "mu_excited", "r"])?;
    let tp = pi_duration(b.get("omega_pi"))?;
    b.push("t_pi_transfer", tp, Microsecond, "T_π = π/Ω", &["omega_pi"])?;
    let e = field_from_rabi(b.get("mu_transition"), b.get("omega_pi"))?;
    b.push("field_transfer", e, VoltPerCm, "E = ħΩ/µ", &["mu_transition", "omega_pi"])?;
    b.push(
        "intensity_transfer",
        field_to_intensity(e)?,
        MicrowattPerCm2,
        "I = cE²/4π",
        &["mu_transition", "omega_pi"],
    )?;
    let stark = stark_mixing_field(b.get("rotational_constant"), b.get("mu_ground"))?;
    b.push("stark_field", stark, KilovoltPerCm, "𝓔 = 2Bħ/µ", &["rotational_constant", "mu_ground"])?;
    let dc = dc_phase_rate(b.get("mu_ground"), stark)?;
    b.push("dc_rate", dc, RadPerSecond, "µ𝓔/ħ", &["rotational_constant", "mu_ground"])?;
    b.push(
        "dc_over_u",
        q(dc.base_value() / u.base_value(), Unitless),
        Unitless,
        "(µ𝓔/ħ)/u",
        &["rotational_constant", "mu_ground", "r"],
    )?;
    let budget = PhaseBudget::Absolute(b.get("delta_phi").in_unit(Radian)?);
    let fp = field_precision(b.get("mu_ground"), b.get("t_field"), budget)?;
    b.push("field_precision", fp, VoltPerCm, "Δ𝓔 = δφħ/(µT)", &["mu_ground", "t_field", "delta_phi"])?;
    let om2 = b.get("omega_2pi").cgs(Dimension::AngularFrequency)?;
    b.push("blockade_ratio", q(u.base_value() / om2, Unitless), Unitless, "u/Ω_2π", &["mu_ground", "r", "omega_2pi"])?;
    b.push(
        "resonance_ratio",
        q(om2 / ue1.base_value(), Unitless),
        Unitless,
        "Ω_2π/u_e1",
        &["mu_ground", "mu_excited", "r", "omega_2pi"],
    )?;
    let tg = gate_time(b.get("omega_pi"), b.get("omega_2pi"))?;
    b.push("gate_time", tg, Microsecond, "T = 2π/Ω_π + 2π/Ω_2π", &["omega_pi", "omega_2pi"])?;
    b.push_count(
        "ops_count",
        ops_count(b.get("coherence"), tg)?,
        "⌊T_coh/T⌋",
        &["coherence", "omega_pi", "omega_2pi"],
    )?;
    Ok(())
}

fn rotational_rows(b: &mut Builder) -> Result<()> {
    use Unit::*;
    let v = trap_dipole_shift(b.get("mu"), b.get("h"), b.get("r"))?;
    b.push("v_trap", v, RadPerSecond, "V = µ²/(h²rħ)", &["mu", "h", "r"])?;
    let zero = q(0.0, RadPerSecond);
    for (row, key, ikey) in [
        ("dressed_control", "omega_coupl_control", "intensity_control"),
        ("dressed_target", "omega_coupl_target", "intensity_target"),
    ] {
        let d = dressed_states(b.get(key), zero)?;
        b.push(row, q(d.shift_plus, RadPerSecond), RadPerSecond, "Δ = ±Ω_coupl", &[key])?;
        let e = field_from_rabi(b.get("mu"), b.get(key))?;
        let unit = if ikey == "intensity_control" { MilliwattPerCm2 } else { MicrowattPerCm2 };
        b.push(ikey, field_to_intensity(e)?, unit, "I = c(ħΩ/µ)²/4π", &["mu", key])?;
    }
    let omt = b.get("omega_coupl_target").cgs(Dimension::AngularFrequency)?;
    b.push(
        "suppression_ratio",
        q(omt / v.base_value(), Unitless),
        Unitless,
        "Ω_t,coupl/V",
        &["omega_coupl_target", "mu", "h", "r"],
    )?;
    let tp = pi_duration(b.get("omega_pi"))?;
    b.push("t_pi", tp, Microsecond, "T_π = π/Ω_π", &["omega_pi"])?;
    let t2 = two_pi_duration(b.get("omega_2pi"))?;
    b.push("t_2pi", t2, Microsecond, "T_2π = 2π/Ω_2π", &["omega_2pi"])?;
    let tg = gate_time_from_durations(tp, t2)?;
    b.push("gate_time", tg, Microsecond, "T = 2T_π + T_2π", &["omega_pi", "omega_2pi"])?;
    b.push_count(
        "ops_count",
        ops_count(b.get("coherence"), tg)?,
        "⌊T_coh/T⌋",
        &["coherence", "omega_pi", "omega_2pi"],
    )?;
    let w = wire_min_frequency(b.get("r"), b.get("wire_velocity"))?;
    b.push("wire_frequency", w, RadPerSecond, "ω = πv/r", &["r", "wire_velocity"])?;
    // N = 2 → 1 transition at 4B
    let four_b = b.get("rotational_constant").cgs(Dimension::Wavenumber)? * 4.0;
    let lam = q(1.0 / four_b, Cm);
    let a = rotational_linewidth(b.get("mu"), lam)?;
    b.push("linewidth_n2", a, RadPerSecond, "A = 4µ²(2π)³/(3λ³ħ)", &["mu", "rotational_constant"])?;
    Ok(())
}
