use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use dipolar::dynamics::{
    run_direct_gate_with, run_inverted_gate_with, two_pi_duration, GateSummary, InteractionSpec, LevelScheme,
    RunOptions,
};
use dipolar::feasibility::{
    dipole_dipole_shift, feasibility_report, scenario_defaults, trap_dipole_shift, FeasibilityReport, Scenario,
};
use dipolar::geometry::{
    angle_from_root_fourth_moment, compare_channel, lattice_ground_width, lattice_phase_error, max_root_fourth_moment,
    max_sigma_r, phase_error_monte_carlo, Channel, ChannelComparison, DipoleGeometry, GeometryDistribution,
    LatticeConfig, MonteCarloEstimate,
};
use dipolar::molecules::{self, HyperfineLevel, MoleculeParams};
use dipolar::reproduce::{run_criterion, run_suite, CriterionOutcome, SuiteOptions, CRITERIA};
use dipolar::sweep::{feasibility_sweep, gate_sweep, Scale, SweepAxis, SweepResult};
use dipolar::units::{convert, parse_with_default};
use dipolar::{Dimension, Quantity, Unit};
use serde::Serialize;

use crate::args::{
    FeasibilityArgs, GateArgs, HyperfineArgs, PhaseErrorArgs, ReproduceArgs, SchemeArg, SweepArgs, SweepKind,
};
use crate::error::{CliError, CliResult};
use crate::output::{flag, num, raw, Report, Table};

const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_TARGET: f64 = 0.01;
const DEFAULT_SWEEP_OMEGA: f64 = 1e5;

fn preset(name: Option<&str>, fallback: &str) -> CliResult<MoleculeParams> {
    Ok(molecules::preset(name.unwrap_or(fallback))?)
}

/// A dimensioned flag. Bare numbers are rejected.
fn quantity(flag: &str, s: &str, dim: Dimension) -> CliResult<Quantity> {
    let q: Quantity = s.parse().map_err(|e| CliError::validation(format!("--{flag}: {e}")))?;
    if q.dimension() != dim {
        return Err(CliError::validation(format!("--{flag}: expected {dim}, got {}", q.dimension())));
    }
    Ok(q)
}

/// An angular frequency; a bare number means rad/s.
fn rate(flag: &str, s: &str) -> CliResult<Quantity> {
    let q = parse_with_default(s, Unit::RadPerSecond).map_err(|e| CliError::validation(format!("--{flag}: {e}")))?;
    if q.dimension() != Dimension::AngularFrequency {
        return Err(CliError::validation(format!("--{flag}: expected angular-frequency, got {}", q.dimension())));
    }
    Ok(q)
}

/// A blockade shift in rad/s; `inf` requests ideal blockade.
fn shift(flag: &str, s: &str) -> CliResult<f64> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        other => Ok(rate(flag, other)?.cgs(Dimension::AngularFrequency)?),
    }
}

/// An angle in radians; a bare number means radians.
fn angle(flag: &str, s: &str) -> CliResult<f64> {
    let q = parse_with_default(s, Unit::Radian).map_err(|e| CliError::validation(format!("--{flag}: {e}")))?;
    q.cgs(Dimension::Dimensionless)
        .map_err(|_| CliError::validation(format!("--{flag}: expected an angle, got {}", q.dimension())))
}

fn phase(flag: &str, s: &str) -> CliResult<f64> {
    match s.trim() {
        "pi" => Ok(PI),
        "-pi" => Ok(-PI),
        "pi/2" => Ok(FRAC_PI_2),
        "-pi/2" => Ok(-FRAC_PI_2),
        "2pi" => Ok(TAU),
        other => angle(flag, other),
    }
}

/// Parse `key=value` overrides against the scenario's inputs, so bare
/// numbers can take the input's own unit where that is unambiguous.
fn overrides(assignments: &[String], defaults: &BTreeMap<String, Quantity>) -> CliResult<BTreeMap<String, Quantity>> {
    let mut out = BTreeMap::new();
    for a in assignments {
        let (k, v) =
            a.split_once('=').ok_or_else(|| CliError::validation(format!("--set `{a}`: expected KEY=VALUE")))?;
        let k = k.trim();
        let slot = defaults.get(k).ok_or_else(|| dipolar::Error::UnknownOverride(k.to_string()))?;
        let q = match slot.dimension() {
            Dimension::AngularFrequency | Dimension::Dimensionless => parse_with_default(v, slot.unit())?,
            dim => quantity(k, v, dim)?,
        };
        out.insert(k.to_string(), q);
    }
    Ok(out)
}

fn default_input(defaults: &Option<BTreeMap<String, Quantity>>, key: &str, preset: &str) -> CliResult<Quantity> {
    defaults
        .as_ref()
        .and_then(|d| d.get(key).copied())
        .ok_or_else(|| CliError::validation(format!("preset `{preset}` has no default for `{key}`; pass --{key}")))
}

fn channel_sigma_label(c: Channel, sigma: f64) -> CliResult<(String, &'static str)> {
    Ok(match c {
        Channel::R => (num(Quantity::new(sigma, Unit::Cm)?.in_unit(Unit::Nanometer)?), "nm"),
        _ => (num(sigma), "rad"),
    })
}

#[derive(Serialize)]
struct AngleBudget {
    channel: Channel,
    root_fourth_moment: f64,
    angle: Quantity,
}

#[derive(Serialize)]
struct Budget {
    target: f64,
    sigma_r_max: Quantity,
    angles: Vec<AngleBudget>,
}

#[derive(Serialize)]
struct LatticeOut {
    depth_recoils: f64,
    periods: u32,
    separation: Quantity,
    width: Quantity,
    relative_error: f64,
}

#[derive(Serialize)]
struct PhaseErrorOut {
    preset: String,
    mu: Quantity,
    r: Quantity,
    samples: usize,
    seed: u64,
    channels: Vec<ChannelComparison>,
    combined: MonteCarloEstimate,
    budget: Budget,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<LatticeOut>,
}

pub fn phase_error(a: &PhaseErrorArgs, seed: Option<u64>) -> CliResult<Report> {
    let m = preset(a.preset.as_deref(), "co")?;
    let mu = match &a.mu {
        Some(s) => quantity("mu", s, Dimension::DipoleMoment)?,
        None => m.mu_excited().unwrap_or(m.mu_ground.quantity),
    };
    let r = match &a.r {
        Some(s) => quantity("r", s, Dimension::Length)?,
        None => default_input(&scenario_defaults(&m, Scenario::DirectLattice).ok(), "r", &m.name)?,
    };
    let samples = a.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = a.seed.or(seed).unwrap_or(DEFAULT_SEED);
    let target = a.target.unwrap_or(DEFAULT_TARGET);
    if !(target > 0.0 && target.is_finite()) {
        return Err(CliError::validation("--target must be positive"));
    }

    let mut dist = GeometryDistribution::fixed(DipoleGeometry::equilibrium(r, mu, mu)?);
    if let Some(s) = &a.sigma_r {
        dist = dist.with_sigma(Channel::R, quantity("sigma-r", s, Dimension::Length)?.cgs(Dimension::Length)?);
    }
    for (c, flag, s) in [
        (Channel::Theta, "sigma-theta", &a.sigma_theta),
        (Channel::Theta1, "sigma-theta1", &a.sigma_theta1),
        (Channel::Theta2, "sigma-theta2", &a.sigma_theta2),
        (Channel::Phi2, "sigma-phi2", &a.sigma_phi2),
    ] {
        if let Some(s) = s {
            dist = dist.with_sigma(c, angle(flag, s)?);
        }
    }
    dist.validate()?;

    let duration = Quantity::new(1.0, Unit::Second)?;
    let channels = Channel::ALL
        .iter()
        .map(|&c| compare_channel(&dist, c, duration, samples, seed))
        .collect::<dipolar::Result<Vec<_>>>()?;
    let combined = phase_error_monte_carlo(&dist, duration, samples, seed)?;

    let mut t = Table::new(&["channel", "sigma", "unit", "analytic", "monte_carlo", "stderr", "z", "within_3se"]);
    let mut csv = Table::new(&["channel", "sigma", "analytic", "monte_carlo", "stderr", "z", "agrees"]);
    for c in &channels {
        let (s, unit) = channel_sigma_label(c.channel, c.sigma)?;
        t.push(vec![
            c.channel.name().into(),
            s,
            unit.into(),
            num(c.analytic),
            num(c.monte_carlo.rel_rms_error),
            num(c.monte_carlo.stderr),
            num(c.z),
            flag(c.agrees),
        ]);
        csv.push(vec![
            c.channel.name().into(),
            raw(c.sigma),
            raw(c.analytic),
            raw(c.monte_carlo.rel_rms_error),
            raw(c.monte_carlo.stderr),
            raw(c.z),
            c.agrees.to_string(),
        ]);
    }
    t.push(vec![
        "all".into(),
        "-".into(),
        "".into(),
        "-".into(),
        num(combined.rel_rms_error),
        num(combined.stderr),
        "-".into(),
        "-".into(),
    ]);
    csv.push(vec![
        "all".into(),
        "".into(),
        "".into(),
        raw(combined.rel_rms_error),
        raw(combined.stderr),
        "".into(),
        "".into(),
    ]);
    let t = t.titled(format!("relative phase error, {} at r = {} ({} samples, seed {seed})", m.name, r, samples));

    let sigma_r_max = convert(max_sigma_r(r, target)?, Unit::Nanometer)?;
    let mut angles = Vec::new();
    for c in [Channel::Theta, Channel::Theta1, Channel::Theta2] {
        if let Some(root) = max_root_fourth_moment(c, target) {
            let a = convert(Quantity::new(angle_from_root_fourth_moment(root), Unit::Radian)?, Unit::Degree)?;
            angles.push(AngleBudget { channel: c, root_fourth_moment: root, angle: a });
        }
    }
    let mut b =
        Table::new(&["tolerance", "value", "unit"]).titled(format!("tolerances for a relative error of {target}"));
    b.push(vec!["sigma_r".into(), num(sigma_r_max.value()), "nm".into()]);
    for ab in &angles {
        b.push(vec![format!("{} (<Δ⁴>^1/4)", ab.channel.name()), num(ab.angle.value()), "deg".into()]);
    }

    let lattice = match a.lattice_depth {
        None => None,
        Some(depth) => {
            let wl = match &a.wavelength {
                Some(s) => quantity("wavelength", s, Dimension::Length)?,
                None => m.lattice_wavelength()?,
            };
            let cfg = LatticeConfig::new(wl, depth, a.periods.unwrap_or(1))?;
            Some(LatticeOut {
                depth_recoils: depth,
                periods: cfg.separation_periods,
                separation: convert(Quantity::new(cfg.mean_separation(), Unit::Cm)?, Unit::Nanometer)?,
                width: convert(lattice_ground_width(&cfg)?, Unit::Nanometer)?,
                relative_error: lattice_phase_error(&cfg)?,
            })
        }
    };
    let mut report_tables = vec![t, b];
    if let Some(l) = &lattice {
        let mut lt = Table::new(&["quantity", "value", "unit"])
            .titled(format!("lattice, depth {} E_R, {} period(s)", l.depth_recoils, l.periods));
        lt.push(vec!["separation".into(), num(l.separation.value()), "nm".into()]);
        lt.push(vec!["ground-state width".into(), num(l.width.value()), "nm".into()]);
        lt.push(vec!["relative phase error".into(), num(l.relative_error), "".into()]);
        report_tables.push(lt);
    }

    let out = PhaseErrorOut {
        preset: m.name.clone(),
        mu,
        r,
        samples,
        seed,
        channels,
        combined,
        budget: Budget { target, sigma_r_max, angles },
        lattice,
    };
    let mut rep = Report::new("phase-error", out)?;
    rep.tables = report_tables;
    rep.csv = Some(csv.to_csv()?);
    Ok(rep)
}

#[derive(Serialize)]
struct GateOut {
    scheme: String,
    preset: String,
    interaction: InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
    repeat: usize,
    decay: bool,
    gate_time: Quantity,
    result: GateSummary,
}

const BASIS: [&str; 4] = ["|00>", "|01>", "|10>", "|11>"];

pub fn gate(a: &GateArgs) -> CliResult<Report> {
    let kind = a.scheme.unwrap_or_default();
    let (fallback, scenario) = match kind {
        SchemeArg::Direct => ("co", Scenario::DirectLattice),
        SchemeArg::Inverted => ("lics", Scenario::InvertedLattice),
        SchemeArg::Rotational => ("bai", Scenario::RotationalTrap),
    };
    let m = preset(a.preset.as_deref(), fallback)?;
    let defaults = scenario_defaults(&m, scenario).ok();
    let length = |flag: &str, s: &Option<String>| -> CliResult<Quantity> {
        match s {
            Some(s) => quantity(flag, s, Dimension::Length),
            None => default_input(&defaults, flag, &m.name),
        }
    };
    let omega_pi = match (&a.omega_pi, &a.omega) {
        (Some(s), _) => rate("omega-pi", s)?,
        (None, Some(s)) => rate("omega", s)?,
        (None, None) => default_input(&defaults, "omega_pi", &m.name)?,
    };
    let omega_2pi = match (&a.omega_2pi, &a.omega) {
        (Some(s), _) => rate("omega-2pi", s)?,
        (None, Some(s)) => rate("omega", s)?,
        (None, None) => default_input(&defaults, "omega_2pi", &m.name)?,
    };
    let lifetime = if a.decay { Some(m.excited_lifetime()?) } else { None };
    let opts = RunOptions {
        decay: a.decay,
        transfer_efficiency: a.transfer_efficiency.unwrap_or(1.0),
        ..RunOptions::default()
    };
    let w = |q: Quantity| -> CliResult<f64> { Ok(q.cgs(Dimension::AngularFrequency)?) };

    let (inter, g) = match kind {
        SchemeArg::Direct => {
            let mu = m.mu_excited()?;
            let u = match &a.u {
                Some(s) => shift("u", s)?,
                None => w(dipole_dipole_shift(mu, mu, length("r", &a.r)?)?)?,
            };
            let inter = InteractionSpec::blockade(u);
            let scheme = LevelScheme::direct(mu, lifetime)?;
            (inter, run_direct_gate_with(&scheme, &inter, omega_pi, omega_2pi, &opts)?)
        }
        SchemeArg::Rotational => {
            let mu = m.mu_ground.quantity;
            let u = match &a.u {
                Some(s) => shift("u", s)?,
                None => w(trap_dipole_shift(mu, length("h", &a.h)?, length("r", &a.r)?)?)?,
            };
            let inter = InteractionSpec::blockade(u);
            let scheme = LevelScheme::direct(mu, lifetime)?;
            (inter, run_direct_gate_with(&scheme, &inter, omega_pi, omega_2pi, &opts)?)
        }
        SchemeArg::Inverted => {
            let mu_g = m.mu_ground.quantity;
            let mu_e = m.mu_excited()?;
            let both = a.phases.as_deref().unwrap_or("pi");
            let phi_ct = phase("phi-ct", a.phi_ct.as_deref().unwrap_or(both))?;
            let phi_tilde = phase("phi-tilde", a.phi_tilde.as_deref().unwrap_or(both))?;
            let t_2pi = two_pi_duration(omega_2pi)?.cgs(Dimension::Time)?;
            let (mut u_gg, mut u_e1) = (f64::INFINITY, 0.0);
            if let Some(s) = &a.r {
                let r = quantity("r", s, Dimension::Length)?;
                u_gg = w(dipole_dipole_shift(mu_g, mu_g, r)?)?;
                u_e1 = w(dipole_dipole_shift(mu_g, mu_e, r)?)?;
            }
            if let Some(s) = &a.u {
                u_gg = shift("u", s)?;
            }
            if let Some(s) = &a.u_e1 {
                u_e1 = shift("u-e1", s)?;
            }
            let inter = InteractionSpec { u_gg, u_e1, ..InteractionSpec::from_table_phases(phi_ct, phi_tilde, t_2pi) };
            let scheme = LevelScheme::inverted(mu_g, mu_e, lifetime)?;
            (inter, run_inverted_gate_with(&scheme, &inter, omega_pi, omega_2pi, true, &opts)?)
        }
    };
    let repeat = a.repeat.unwrap_or(1);
    if repeat < 1 {
        return Err(CliError::validation("--repeat must be at least 1"));
    }
    let g = if repeat > 1 { g.repeat(repeat) } else { g };
    let s = g.summary();
    let gate_time = convert(Quantity::new(s.duration, Unit::Second)?, Unit::Microsecond)?;

    let mut states = Table::new(&["state", "|U_ii|", "phase", "residual", "leakage", "transient"])
        .titled(format!("{kind} gate, {} (x{repeat})", m.name));
    let mut csv = Table::new(&["state", "magnitude", "phase", "residual_phase", "leakage", "transient_excitation"]);
    for (i, label) in BASIS.iter().enumerate() {
        states.push(vec![
            (*label).into(),
            num(s.magnitude[i][i]),
            num(s.phases[i]),
            num(s.residual_phases[i]),
            num(s.leakage[i]),
            num(s.transient_excitation[i]),
        ]);
        csv.push(vec![
            (*label).into(),
            raw(s.magnitude[i][i]),
            raw(s.phases[i]),
            raw(s.residual_phases[i]),
            raw(s.leakage[i]),
            raw(s.transient_excitation[i]),
        ]);
    }
    let matrix = |title: &str, m: &[[f64; 4]; 4]| {
        let mut t = Table::new(&["", BASIS[0], BASIS[1], BASIS[2], BASIS[3]]).titled(title);
        for (i, row) in m.iter().enumerate() {
            let mut r = vec![BASIS[i].to_string()];
            r.extend(row.iter().map(|&v| num(v)));
            t.push(r);
        }
        t
    };
    let mut summary = Table::new(&["quantity", "value"]);
    summary.push(vec!["fidelity".into(), num(s.fidelity)]);
    summary.push(vec!["gate time [µs]".into(), num(gate_time.value())]);
    summary.push(vec!["u [rad/s]".into(), num(if kind == SchemeArg::Inverted { inter.u_gg } else { inter.u_ee })]);
    summary.push(vec!["Ω_π [rad/s]".into(), num(w(omega_pi)?)]);
    summary.push(vec!["Ω_2π [rad/s]".into(), num(w(omega_2pi)?)]);

    let tables = vec![states, matrix("|U_ij|", &s.magnitude), matrix("arg U_ij", &s.phase), summary];
    let out = GateOut {
        scheme: kind.to_string(),
        preset: m.name.clone(),
        interaction: inter,
        omega_pi,
        omega_2pi,
        repeat,
        decay: a.decay,
        gate_time,
        result: s,
    };
    let mut rep = Report::new("gate", out)?;
    rep.tables = tables;
    rep.csv = Some(csv.to_csv()?);
    Ok(rep)
}

fn status(row: &dipolar::feasibility::ReportRow) -> String {
    match (&row.expected, row.within) {
        (Some(e), Some(true)) => format!("within {} of {}", e.tolerance, num(e.value)),
        (Some(e), _) => format!("OUTSIDE {} of {}", e.tolerance, num(e.value)),
        _ => "-".into(),
    }
}

pub fn feasibility(a: &FeasibilityArgs) -> CliResult<Report> {
    let scenario: Scenario = a.scenario.parse()?;
    let name = a.preset.as_deref().unwrap_or(scenario.default_preset());
    let m = molecules::preset(name)?;
    let defaults = scenario_defaults(&m, scenario)?;
    let ov = overrides(&a.set, &defaults)?;
    let r: FeasibilityReport = feasibility_report(name, scenario, &ov)?;

    let mut t = Table::new(&["quantity", "value", "unit", "expected", "deviation", "status"])
        .titled(format!("{} / {}", r.preset, r.scenario));
    let mut csv =
        Table::new(&["quantity", "value", "unit", "expected", "rel_deviation", "tolerance", "within", "formula"]);
    for row in &r.rows {
        t.push(vec![
            row.name.clone(),
            num(row.value),
            row.unit.symbol().into(),
            row.expected.as_ref().map(|e| num(e.value)).unwrap_or_else(|| "-".into()),
            row.rel_deviation.map(num).unwrap_or_else(|| "-".into()),
            status(row),
        ]);
        csv.push(vec![
            row.name.clone(),
            raw(row.value),
            row.unit.symbol().into(),
            row.expected.as_ref().map(|e| raw(e.value)).unwrap_or_default(),
            row.rel_deviation.map(raw).unwrap_or_default(),
            row.expected.as_ref().map(|e| e.tolerance.to_string()).unwrap_or_default(),
            row.within.map(|w| w.to_string()).unwrap_or_default(),
            row.formula.clone(),
        ]);
    }
    let mut inputs = Table::new(&["input", "value"]).titled("inputs");
    for (k, v) in &r.inputs {
        inputs.push(vec![k.clone(), v.to_string()]);
    }
    let outside: Vec<&str> = r.outside().map(|row| row.name.as_str()).collect();
    let note = if outside.is_empty() {
        "all compared rows within tolerance".to_string()
    } else {
        format!("outside tolerance: {}", outside.join(", "))
    };
    let mut rep = Report::new("feasibility", &r)?.table(t).table(inputs).note(note);
    rep.csv = Some(csv.to_csv()?);
    Ok(rep)
}

#[derive(Serialize)]
struct HyperfineOut<'a> {
    preset: &'a str,
    n_max: u32,
    levels: &'a [HyperfineLevel],
}

pub fn hyperfine(a: &HyperfineArgs) -> CliResult<Report> {
    let m = preset(a.preset.as_deref(), "bai")?;
    let n_max = a.nmax.unwrap_or(2);
    let levels = molecules::hyperfine_levels(&m, n_max)?;
    let mut csv = Table::new(&["N", "J", "F", "energy_mhz", "degeneracy", "purity"]);
    let mut tables = Vec::new();
    for n in 0..=n_max {
        let mut t = Table::new(&["J", "F", "energy [MHz]", "2F+1", "purity"]).titled(format!("{} N = {n}", m.name));
        for l in levels.iter().filter(|l| l.n == n) {
            t.push(vec![l.j.to_string(), l.f.to_string(), num(l.energy), l.degeneracy.to_string(), num(l.purity)]);
            csv.push(vec![
                n.to_string(),
                l.j.to_string(),
                l.f.to_string(),
                raw(l.energy),
                l.degeneracy.to_string(),
                raw(l.purity),
            ]);
        }
        tables.push(t);
    }
    let mut rep = Report::new("hyperfine", HyperfineOut { preset: &m.name, n_max, levels: &levels })?;
    rep.tables = tables;
    rep.csv = Some(csv.to_csv()?);
    Ok(rep)
}

#[derive(Serialize)]
struct SweepOut<'a> {
    kind: &'static str,
    preset: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Scenario>,
    unit: Unit,
    fixed: BTreeMap<String, Quantity>,
    sweep: &'a SweepResult,
}

pub fn sweep(a: &SweepArgs) -> CliResult<Report> {
    let axis = SweepAxis {
        parameter: a.param.clone(),
        start: a.from,
        stop: a.to,
        steps: a.steps,
        scale: if a.log { Scale::Log } else { Scale::Linear },
    };
    axis.validate()?;
    let kind = a.kind.unwrap_or_default();
    let mut fixed = BTreeMap::new();
    let (preset_name, scenario, unit, result) = match kind {
        SweepKind::Gate => {
            let m = preset(a.preset.as_deref(), "co")?;
            let mu = m.mu_excited()?;
            let omega = match &a.omega {
                Some(s) => rate("omega", s)?,
                None => Quantity::new(DEFAULT_SWEEP_OMEGA, Unit::RadPerSecond)?,
            };
            let u = match &a.u {
                Some(s) => rate("u", s)?,
                None => {
                    let defaults = scenario_defaults(&m, Scenario::DirectLattice).ok();
                    dipole_dipole_shift(mu, mu, default_input(&defaults, "r", &m.name)?)?
                }
            };
            let scheme = LevelScheme::direct(mu, None)?;
            let result = gate_sweep(
                &axis,
                &scheme,
                u.cgs(Dimension::AngularFrequency)?,
                omega.cgs(Dimension::AngularFrequency)?,
            )?;
            match a.param.as_str() {
                "u" => fixed.insert("omega".to_string(), omega),
                _ => fixed.insert("u".to_string(), u),
            };
            (m.name, None, Unit::RadPerSecond, result)
        }
        SweepKind::Feasibility => {
            let scenario: Scenario = a
                .scenario
                .as_deref()
                .ok_or_else(|| CliError::validation("feasibility sweeps need --scenario"))?
                .parse()?;
            let name = a.preset.as_deref().unwrap_or(scenario.default_preset());
            let m = molecules::preset(name)?;
            let defaults = scenario_defaults(&m, scenario)?;
            let unit = match &a.unit {
                Some(u) => u.parse::<Unit>()?,
                None => defaults.get(&a.param).ok_or_else(|| dipolar::Error::UnknownOverride(a.param.clone()))?.unit(),
            };
            let base = overrides(&a.set, &defaults)?;
            fixed = base.clone();
            let result = feasibility_sweep(&axis, name, scenario, unit, &base)?;
            (m.name, Some(scenario), unit, result)
        }
    };

    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    let csv = String::from_utf8(buf).expect("utf-8 csv");

    let mut cols: Vec<String> = result.rows.iter().flat_map(|r| r.outputs.keys().cloned()).collect();
    cols.sort();
    cols.dedup();
    let mut header = vec!["index".to_string(), format!("{} [{}]", a.param, unit.symbol())];
    header.extend(cols.iter().cloned());
    header.push("error".into());
    let mut t = Table { title: Some(format!("{} sweep of {}", kind_name(kind), a.param)), header, rows: Vec::new() };
    for r in &result.rows {
        let mut row = vec![r.index.to_string(), num(r.value)];
        row.extend(cols.iter().map(|c| r.outputs.get(c).map(|&v| num(v)).unwrap_or_else(|| "-".into())));
        row.push(r.error.clone().unwrap_or_default());
        t.push(row);
    }
    let ok = result.succeeded();
    let out = SweepOut { kind: kind_name(kind), preset: &preset_name, scenario, unit, fixed, sweep: &result };
    let mut rep = Report::new("sweep", out)?.table(t).note(format!("{ok} of {} points succeeded", result.rows.len()));
    rep.csv = Some(csv);
    if ok == 0 {
        rep.failure = Some(CliError::Numerical("no sweep point succeeded".into()));
    }
    Ok(rep)
}

fn kind_name(k: SweepKind) -> &'static str {
    match k {
        SweepKind::Gate => "gate",
        SweepKind::Feasibility => "feasibility",
    }
}

#[derive(Serialize)]
struct CriterionOut<'a> {
    #[serde(flatten)]
    outcome: &'a CriterionOutcome,
    passed: bool,
}

#[derive(Serialize)]
struct ReproduceOut<'a> {
    options: SuiteOptions,
    passed: usize,
    total: usize,
    criteria: Vec<CriterionOut<'a>>,
}

pub fn reproduce(a: &ReproduceArgs, seed: Option<u64>) -> CliResult<Report> {
    let d = SuiteOptions::default();
    let opts = SuiteOptions {
        seed: a.seed.or(seed).unwrap_or(d.seed),
        mc_samples: a.samples.unwrap_or(d.mc_samples),
        random_sequences: a.sequences.unwrap_or(d.random_sequences),
    };
    let outcomes = match a.criterion {
        Some(id) if !(1..=CRITERIA).contains(&id) => {
            return Err(CliError::validation(format!("--criterion must be between 1 and {CRITERIA}")))
        }
        Some(id) => vec![run_criterion(id, &opts)?],
        None => run_suite(&opts)?,
    };

    let mut t = Table::new(&["", "#", "criterion", "checks"]).titled("acceptance criteria");
    let mut failed = Table::new(&["#", "check", "value", "reference"]).titled("failed checks");
    let mut csv = Table::new(&["criterion", "title", "check", "value", "reference", "passed"]);
    for o in &outcomes {
        let n_ok = o.checks.iter().filter(|c| c.passed).count();
        t.push(vec![
            if o.passed() { "PASS" } else { "FAIL" }.into(),
            o.id.to_string(),
            o.title.clone(),
            format!("{n_ok}/{}", o.checks.len()),
        ]);
        for c in &o.checks {
            if !c.passed {
                failed.push(vec![o.id.to_string(), c.name.clone(), num(c.value), c.reference.clone()]);
            }
            csv.push(vec![
                o.id.to_string(),
                o.title.clone(),
                c.name.clone(),
                raw(c.value),
                c.reference.clone(),
                c.passed.to_string(),
            ]);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let total = outcomes.len();
    let out = ReproduceOut {
        options: opts,
        passed,
        total,
        criteria: outcomes.iter().map(|o| CriterionOut { outcome: o, passed: o.passed() }).collect(),
    };
    let mut rep = Report::new("reproduce", out)?.table(t);
    if !failed.rows.is_empty() {
        rep = rep.table(failed);
    }
    rep = rep.note(format!("{passed} of {total} criteria passed"));
    rep.csv = Some(csv.to_csv()?);
    if a.strict && passed < total {
        rep.failure = Some(CliError::Numerical(format!("{} criteria failed", total - passed)));
    }
    Ok(rep)
}
