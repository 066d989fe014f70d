//! The reference-number suite: every closed-form estimate and gate property
//! checked against its quoted value, one criterion at a time.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    diag4, gate_time, gate_time_from_durations, ideal_direct, ideal_inverted_half, ideal_phase_gate, pi_duration,
    run_direct_gate, run_inverted_gate, run_sequence, two_pi_duration, InteractionSpec, Level, LevelScheme, Molecule,
    PulseSequence, PulseSpec, RunOptions, C64,
};
use crate::error::{invalid, Result};
use crate::feasibility::{dipole_dipole_shift, feasibility_report, ops_count, FeasibilityReport, Scenario};
use crate::geometry::{
    angle_from_root_fourth_moment, lattice_phase_error, max_root_fourth_moment, max_sigma_r, phase_error_monte_carlo,
    sensitivity_analytic, trap_tolerances, Channel, DipoleGeometry, GeometryDistribution, LatticeConfig,
};
use crate::molecules::hyperfine::{spin_rotor_levels, SpinRotorConstants};
use crate::molecules::{dressed_states, hyperfine_levels, preset, HalfInt};
use crate::sweep::{gate_sweep, Scale, SweepAxis};
use crate::units::{field_from_rabi, field_to_intensity, Quantity, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// What the value is compared against, in words.
    pub reference: String,
    pub passed: bool,
}

impl Check {
    fn relative(name: &str, value: f64, reference: f64, tol: f64) -> Self {
        let dev = (value - reference) / reference;
        Check {
            name: name.into(),
            value,
            reference: format!("{reference:e} ±{}% (dev {:+.2}%)", tol * 100.0, dev * 100.0),
            passed: dev.abs() <= tol,
        }
    }

    fn order_of_magnitude(name: &str, value: f64, reference: f64) -> Self {
        Check {
            name: name.into(),
            value,
            reference: format!("{reference:e} within ×10"),
            passed: value > 0.0 && (value / reference).log10().abs() < 1.0,
        }
    }

    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, reference: format!("≤ {bound:e}"), passed: value <= bound }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, reference: format!("≥ {bound}"), passed: value >= bound }
    }

    fn rounded(name: &str, value: f64, reference: f64, decimals: i32) -> Self {
        let k = 10f64.powi(decimals);
        Check {
            name: name.into(),
            value,
            reference: format!("{reference} at {decimals} decimals"),
            passed: (value * k).round() == (reference * k).round(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed() { "PASS" } else { "FAIL" };
        let n = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "[{mark}] {:>2}. {} ({n}/{} checks)", self.id, self.title, self.checks.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub mc_samples: usize,
    pub random_sequences: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 2009, mc_samples: 100_000, random_sequences: 1000 }
    }
}

pub const CRITERIA: u8 = 12;

pub fn criterion_title(id: u8) -> &'static str {
    match id {
        1 => "CO blockade shift",
        2 => "gate times",
        3 => "geometry error budget",
        4 => "lattice motional error",
        5 => "trap position budget",
        6 => "gate truth tables",
        7 => "blockade scaling law",
        8 => "LiCs estimates",
        9 => "BaI estimates and hyperfine structure",
        10 => "operation counts",
        11 => "norm conservation",
        12 => "intensity chain",
        _ => "unknown",
    }
}

fn q(v: f64, u: Unit) -> Quantity {
    Quantity::new(v, u).expect("finite constant")
}

fn w(v: f64) -> Quantity {
    q(v, Unit::RadPerSecond)
}

fn no_overrides() -> BTreeMap<String, Quantity> {
    BTreeMap::new()
}

fn report(s: Scenario) -> Result<FeasibilityReport> {
    feasibility_report(s.default_preset(), s, &no_overrides())
}

fn row(r: &FeasibilityReport, name: &str) -> Result<f64> {
    r.row(name).map(|x| x.value).ok_or_else(|| invalid("row", format!("report lacks `{name}`")))
}

/// Run one criterion.
pub fn run_criterion(id: u8, opts: &SuiteOptions) -> Result<CriterionOutcome> {
    let checks = match id {
        1 => c1()?,
        2 => c2()?,
        3 => c3(opts)?,
        4 => c4()?,
        5 => c5()?,
        6 => c6()?,
        7 => c7()?,
        8 => c8()?,
        9 => c9(opts)?,
        10 => c10()?,
        11 => c11(opts)?,
        12 => c12()?,
        _ => return Err(invalid("criterion", format!("{id} is not in 1..={CRITERIA}"))),
    };
    Ok(CriterionOutcome { id, title: criterion_title(id).into(), checks })
}

/// Run all criteria in order.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CriterionOutcome>> {
    (1..=CRITERIA).map(|id| run_criterion(id, opts)).collect()
}

fn c1() -> Result<Vec<Check>> {
    let mu = q(1.37, Unit::Debye);
    let u = dipole_dipole_shift(mu, mu, q(100.0, Unit::Nanometer))?.value();
    Ok(vec![Check::relative("u(1.37 D, 100 nm) [rad/s]", u, 1.87e6, 0.05)])
}

fn c2() -> Result<Vec<Check>> {
    let us = |x: Quantity| x.in_unit(Unit::Microsecond);
    let fast = us(gate_time(w(1e5), w(1e5))?)?;
    let slow = gate_time(w(2e3), w(2e3))?.in_unit(Unit::Millisecond)?;
    let inv = us(gate_time(w(6e4), w(1e5))?)?;
    let rot = us(gate_time_from_durations(pi_duration(w(3e5))?, two_pi_duration(w(2e4))?)?)?;
    Ok(vec![
        Check::relative("direct, Ω = 1e5 [µs]", fast, 126.0, 0.02),
        Check::relative("direct, Ω = 2e3 [ms]", slow, 6.3, 0.02),
        Check::relative("inverted, Ω = 6e4/1e5 [µs]", inv, 160.0, 0.10),
        Check::relative("rotational, 2T_π + T_2π [µs]", rot, 320.0, 0.05),
    ])
}

fn co_pair(r_nm: f64) -> Result<DipoleGeometry> {
    DipoleGeometry::equilibrium(q(r_nm, Unit::Nanometer), q(1.37, Unit::Debye), q(1.37, Unit::Debye))
}

fn c3(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let target = 0.01;
    let deg = 180.0 / PI;
    let sr = max_sigma_r(q(500.0, Unit::Nanometer), target)?;
    let th = angle_from_root_fourth_moment(max_root_fourth_moment(Channel::Theta, target).expect("θ enters"));
    let th1 = angle_from_root_fourth_moment(max_root_fourth_moment(Channel::Theta1, target).expect("θ₁ enters"));
    let mut checks = vec![
        Check::relative("σ_r for 1% at 500 nm [nm]", sr.in_unit(Unit::Nanometer)?, 1.5, 0.10),
        Check::relative("Δθ for 1% [deg]", th * deg, 3.0, 0.10),
        Check::relative("Δθ₁,₂ for 1% [deg]", th1 * deg, 8.0, 0.10),
    ];
    // Gaussian σ whose analytic error is exactly the target: √⟨Δθ⁴⟩ = √3σ²
    let gauss = |ch| (max_root_fourth_moment(ch, target).expect("angle enters") / 3f64.sqrt()).sqrt();
    let mean = co_pair(500.0)?;
    let t = q(1e-6, Unit::Second);
    for (ch, s) in [
        (Channel::R, sr.base_value()),
        (Channel::Theta, gauss(Channel::Theta)),
        (Channel::Theta1, gauss(Channel::Theta1)),
        (Channel::Theta2, gauss(Channel::Theta2)),
    ] {
        let dist = GeometryDistribution::fixed(mean).with_sigma(ch, s);
        let analytic = sensitivity_analytic(ch, &dist)?;
        let mc = phase_error_monte_carlo(&dist, t, opts.mc_samples, opts.seed)?;
        let z = (mc.rel_rms_error - analytic).abs() / mc.stderr;
        checks.push(Check {
            name: format!("MC vs analytic, {} [bootstrap SE]", ch.name()),
            value: z,
            reference: format!("≤ 3 (MC {:.5}, analytic {:.5})", mc.rel_rms_error, analytic),
            passed: z <= 3.0,
        });
    }
    Ok(checks)
}

fn c4() -> Result<Vec<Check>> {
    let cfg = |depth, n| LatticeConfig::new(q(200.0, Unit::Nanometer), depth, n);
    Ok(vec![
        Check::rounded("neighbours, 10 E_R", lattice_phase_error(&cfg(10.0, 1)?)?, 0.54, 2),
        Check::rounded("neighbours, 40 E_R", lattice_phase_error(&cfg(40.0, 1)?)?, 0.38, 2),
        Check::rounded("five periods, 10 E_R", lattice_phase_error(&cfg(10.0, 5)?)?, 0.11, 2),
        Check::rounded("five periods, 40 E_R", lattice_phase_error(&cfg(40.0, 5)?)?, 0.08, 2),
    ])
}

fn c5() -> Result<Vec<Check>> {
    let (sh, _) = trap_tolerances(q(1.0, Unit::Micrometer), q(10.0, Unit::Micrometer), 0.01)?;
    let (_, sr) = trap_tolerances(q(1.0, Unit::Micrometer), q(10.0, Unit::Micrometer), 0.01)?;
    Ok(vec![
        Check::relative("σ_h at h = 1 µm [nm]", sh.in_unit(Unit::Nanometer)?, 5.0, 1e-12),
        Check::relative("σ_r at r = 10 µm [nm]", sr.in_unit(Unit::Nanometer)?, 100.0, 1e-12),
    ])
}

fn max_dev(a: &nalgebra::Matrix4<C64>, b: &nalgebra::Matrix4<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c6() -> Result<Vec<Check>> {
    let direct = LevelScheme::direct(q(1.37, Unit::Debye), None)?;
    let om = 1e5;
    let strong = run_direct_gate(&direct, &InteractionSpec::blockade(1e4 * om), w(om), w(om))?;
    let leak = strong.leakage.iter().cloned().fold(0.0, f64::max);
    let u = 18.7 * om;
    let weak = run_direct_gate(&direct, &InteractionSpec::blockade(u), w(om), w(om))?;
    let est = PI * om / (2.0 * u);

    let inverted = LevelScheme::inverted(q(5.5, Unit::Debye), q(-0.45, Unit::Debye), None)?;
    let t2 = 2.0 * PI / 1e5;
    let inter = InteractionSpec { u_gg: f64::INFINITY, ..InteractionSpec::from_table_phases(PI, PI, t2) };
    let half = run_inverted_gate(&inverted, &inter, w(6e4), w(1e5), true)?;
    let full = half.repeated(2, ideal_phase_gate());
    let one = C64::new(1.0, 0.0);
    Ok(vec![
        Check::at_most("direct, u/Ω = 1e4: |U − diag(1,−1,−1,−1)|", max_dev(&strong.basis_map, &ideal_direct()), 1e-3),
        Check::at_most("direct, u/Ω = 1e4: leakage", leak, 1e-6),
        Check::at_least("direct, u/Ω = 1e4: fidelity", strong.fidelity, 0.9999),
        Check::relative("direct, u/Ω = 18.7: |11⟩ residual / (πΩ/2u)", weak.residual_phases[3] / est, 1.0, 0.30),
        Check::at_least("direct, u/Ω = 18.7: fidelity", weak.fidelity, 0.99),
        Check::at_most("inverted, once: |U − diag(1,1,1,i)|", max_dev(&half.basis_map, &ideal_inverted_half()), 1e-8),
        Check::at_most(
            "inverted, twice: |U − diag(1,1,1,−1)|",
            max_dev(&full.basis_map, &diag4([one, one, one, -one])),
            1e-8,
        ),
    ])
}

/// Least-squares slope of ln|y| against ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn c7() -> Result<Vec<Check>> {
    let scheme = LevelScheme::direct(q(1.37, Unit::Debye), None)?;
    let mut checks = Vec::new();
    for om in [2e3, 1e5, 3e6] {
        let axis =
            SweepAxis { parameter: "u".into(), start: 10.0 * om, stop: 100.0 * om, steps: 12, scale: Scale::Log };
        let s = gate_sweep(&axis, &scheme, 0.0, om)?;
        let x: Vec<f64> = s.rows.iter().map(|r| r.value).collect();
        let y: Vec<f64> =
            s.rows.iter().map(|r| r.outputs.get("residual_phase_11").copied().unwrap_or(f64::NAN)).collect();
        let slope = log_log_slope(&x, &y);
        checks.push(Check {
            name: format!("slope of |11⟩ residual vs u, Ω = {om:e}"),
            value: slope,
            reference: "−1 ± 0.1".into(),
            passed: (slope + 1.0).abs() <= 0.1,
        });
    }
    Ok(checks)
}

fn c8() -> Result<Vec<Check>> {
    let r = report(Scenario::InvertedLattice)?;
    Ok(vec![
        Check::relative("u [rad/s]", row(&r, "u_gg")?, 5e5, 0.15),
        Check::relative("u_e1 [rad/s]", row(&r, "u_e1")?, 4e4, 0.15),
        Check::relative("mixing field [kV/cm]", row(&r, "stark_field")?, 4.0, 0.10),
        Check::relative("µ𝓔/ħ [rad/s]", row(&r, "dc_rate")?, 7e10, 0.10),
        Check::relative("field precision, δφ = 0.01 [µV/cm]", row(&r, "field_precision")? * 1e6, 5.0, 0.25),
    ])
}

/// Σ (2F+1)·E over each N multiplet minus its rotational energy, for
/// Fermi-contact coupling only.
pub fn fermi_contact_sum_rule_residual(b_rot: f64, b_f: f64, i: HalfInt, n_max: u32) -> Result<f64> {
    let k = SpinRotorConstants { b_rot, b_f, ..Default::default() };
    let lv = spin_rotor_levels(&k, HalfInt::HALF, i, n_max)?;
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let (wsum, esum) = lv
            .iter()
            .filter(|l| l.n == n)
            .fold((0.0, 0.0), |(a, b), l| (a + l.degeneracy as f64, b + l.degeneracy as f64 * l.energy));
        let scale = (wsum * (b_rot * (n * (n + 1)) as f64).abs()).max(wsum * b_f.abs()).max(1.0);
        worst = worst.max((esum - wsum * b_rot * (n * (n + 1)) as f64).abs() / scale);
    }
    Ok(worst)
}

fn c9(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let r = report(Scenario::RotationalTrap)?;
    let mut checks = vec![Check::relative("V [rad/s]", row(&r, "v_trap")?, 3.6e5, 0.10)];
    for om in [3e7, 3e6] {
        let d = dressed_states(w(om), w(0.0))?;
        checks.push(Check {
            name: format!("dressed shifts at Ω = {om:e}"),
            value: d.shift_plus,
            reference: format!("±{om:e} exactly"),
            passed: d.shift_plus == om && d.shift_minus == -om,
        });
    }
    let tp = pi_duration(w(3e5))?.in_unit(Unit::Microsecond)?;
    checks.push(Check {
        name: "T_π at Ω = 3e5 [µs]".into(),
        value: tp,
        reference: "10 exactly".into(),
        passed: (tp - 10.0).abs() <= 1e-9,
    });
    let lv = hyperfine_levels(&preset("BaI")?, 0)?;
    let f: Vec<f64> = lv.iter().map(|l| l.f.value()).collect();
    let mult: u32 = lv.iter().map(|l| l.degeneracy).sum();
    checks.push(Check {
        name: "N = 0 levels".into(),
        value: lv.len() as f64,
        reference: format!("two levels F = 2, 3 with 12 states (got F = {f:?}, {mult} states)"),
        passed: f == [2.0, 3.0] && mult == 12,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..64 {
        let b = rng.random_range(10.0..5000.0);
        let bf = rng.random_range(-500.0..500.0);
        let i = HalfInt::from_twice(rng.random_range(0..8));
        let n_max = rng.random_range(0..=4);
        worst = worst.max(fermi_contact_sum_rule_residual(b, bf, i, n_max)?);
    }
    checks.push(Check::at_most("Fermi-contact sum rule, 64 random cases", worst, 1e-10));
    Ok(checks)
}

fn c10() -> Result<Vec<Check>> {
    let one = q(1.0, Unit::Second);
    let mut checks = Vec::new();
    for (s, expect) in
        [(Scenario::DirectLattice, 8e3), (Scenario::InvertedLattice, 6e3), (Scenario::RotationalTrap, 3e3)]
    {
        let r = report(s)?;
        let t = q(row(&r, "gate_time")?, Unit::Microsecond);
        let n = ops_count(one, t)? as f64;
        checks.push(Check::relative(&format!("{s}: operations in 1 s"), n, expect, 0.20));
    }
    Ok(checks)
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Worst norm drift over `count` random decay-free sequences.
pub fn random_sequence_norm_drift(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let scheme = if rng.random_bool(0.5) {
            LevelScheme::direct(q(1.0, Unit::Debye), None)?
        } else {
            LevelScheme::inverted(q(5.0, Unit::Debye), q(0.5, Unit::Debye), None)?
        };
        let levels = scheme.levels.clone();
        let pick = |rng: &mut ChaCha8Rng| levels[rng.random_range(0..levels.len())];
        let inter = InteractionSpec {
            u_ee: if rng.random_bool(0.2) { f64::INFINITY } else { rng.random_range(-1e6..1e6) },
            u_e1: rng.random_range(-1e5..1e5),
            u_gg: rng.random_range(-1e6..1e6),
            dc_phase_rate_g: rng.random_range(-1e5..1e5),
            dc_phase_rate_e: rng.random_range(-1e5..1e5),
            lattice_sum_rate: rng.random_range(0.0..1e4),
            pair_rate: rng.random_range(0.0..1e4),
        };
        let mut seq = PulseSequence::default();
        for _ in 0..rng.random_range(1..=6) {
            let target = if rng.random_bool(0.5) { Molecule::Control } else { Molecule::Target };
            let a = pick(&mut rng);
            let mut b = pick(&mut rng);
            while b == a {
                b = pick(&mut rng);
            }
            let pulse = if rng.random_bool(0.15) && scheme.levels.contains(&Level::OnePrime) {
                PulseSpec::ideal_transfer(target, Level::One, Level::OnePrime, rng.random_range(0.05..=1.0))?
            } else {
                PulseSpec::free(
                    target,
                    (a, b),
                    rng.random_range(0.0..1e6),
                    rng.random_range(0.0..2e-5),
                    rng.random_range(-1e6..1e6),
                    rng.random_range(-PI..PI),
                )?
            };
            seq.push(pulse, rng.random_bool(0.7));
        }
        let opts = RunOptions { substeps: 8, ..RunOptions::default() };
        let out = run_sequence(&scheme, &inter, &seq, &opts)?;
        let d = out.unitary.nrows();
        let psi = random_state(&mut rng, d);
        let drift = ((&out.unitary * &psi).norm() - 1.0).abs();
        let gram = out.unitary.adjoint() * &out.unitary - DMatrix::<C64>::identity(d, d);
        let gram_dev = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(drift).max(gram_dev);
    }
    Ok(worst)
}

fn c11(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let drift = random_sequence_norm_drift(opts.random_sequences, opts.seed)?;
    Ok(vec![Check::at_most(&format!("norm drift over {} random sequences", opts.random_sequences), drift, 1e-10)])
}

fn c12() -> Result<Vec<Check>> {
    let e = field_from_rabi(q(2e-4, Unit::Debye), w(6e4))?;
    let i = field_to_intensity(e)?;
    let e2 = field_from_rabi(q(0.2, Unit::Debye), w(6e4))?;
    let i2 = field_to_intensity(e2)?;
    Ok(vec![
        Check::relative("CO field [V/cm]", e.in_unit(Unit::VoltPerCm)?, 100.0, 0.25),
        Check::relative("CO intensity [W/cm²]", i.in_unit(Unit::WattPerCm2)?, 25.0, 0.25),
        Check::order_of_magnitude("LiCs field [V/cm]", e2.in_unit(Unit::VoltPerCm)?, 0.15),
        Check::order_of_magnitude("LiCs intensity [µW/cm²]", i2.in_unit(Unit::MicrowattPerCm2)?, 70.0),
    ])
}
