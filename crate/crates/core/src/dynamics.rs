//! Blockade pulse sequences on two few-level molecules.
//!
//! The product space is ordered (control, target): configuration `(c, t)` has
//! index `c * n + t` for an `n`-level scheme. Hamiltonians are in the rotating
//! frame, piecewise constant, and propagated by exact matrix exponentials.
//!
//! Pulse convention: a resonant drive on `a ↔ b` is
//! `H = −(Ω/2)(e^{iφ}|b⟩⟨a| + h.c.) − δ|b⟩⟨b|`, so a π pulse maps
//! `|a⟩ → i|b⟩` and a 2π pulse returns `−|a⟩`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::{Dimension, Quantity, Unit};

pub type C64 = Complex<f64>;

const ZERO: C64 = Complex::new(0.0, 0.0);
const ONE: C64 = Complex::new(1.0, 0.0);
const I: C64 = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Zero,
    One,
    OnePrime,
    Excited,
}

impl Level {
    fn label(self) -> &'static str {
        match self {
            Level::Zero => "0",
            Level::One => "1",
            Level::OnePrime => "1'",
            Level::Excited => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Qubit in weakly polar levels, interaction switched on by exciting to |e⟩.
    Direct,
    /// Qubit in strongly polar levels, interaction switched off by exciting.
    Inverted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub kind: SchemeKind,
    pub levels: Vec<Level>,
    /// Permanent dipole moment per level, esu·cm, signed.
    pub dipoles: Vec<f64>,
    /// Radiative lifetime per level in seconds; `None` for a stable level.
    pub lifetimes: Vec<Option<f64>>,
}

impl LevelScheme {
    /// Levels {|0⟩, |1⟩, |e⟩}; only |e⟩ is polar.
    pub fn direct(mu_excited: Quantity, excited_lifetime: Option<Quantity>) -> Result<Self> {
        let s = Self {
            kind: SchemeKind::Direct,
            levels: vec![Level::Zero, Level::One, Level::Excited],
            dipoles: vec![0.0, 0.0, mu_excited.cgs(Dimension::DipoleMoment)?],
            lifetimes: vec![None, None, lifetime(excited_lifetime)?],
        };
        s.validate()?;
        Ok(s)
    }

    /// Levels {|0⟩, |1⟩, |1′⟩, |e⟩}; the three ground levels share `mu_ground`.
    pub fn inverted(mu_ground: Quantity, mu_excited: Quantity, excited_lifetime: Option<Quantity>) -> Result<Self> {
        let g = mu_ground.cgs(Dimension::DipoleMoment)?;
        let s = Self {
            kind: SchemeKind::Inverted,
            levels: vec![Level::Zero, Level::One, Level::OnePrime, Level::Excited],
            dipoles: vec![g, g, g, mu_excited.cgs(Dimension::DipoleMoment)?],
            lifetimes: vec![None, None, None, lifetime(excited_lifetime)?],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.levels.len();
        if self.dipoles.len() != n || self.lifetimes.len() != n {
            return Err(invalid("scheme", "per-level tables must match the level list"));
        }
        for (i, a) in self.levels.iter().enumerate() {
            if self.levels[..i].contains(a) {
                return Err(invalid("scheme", format!("level {} listed twice", a.label())));
            }
        }
        for need in [Level::Zero, Level::One, Level::Excited] {
            if !self.levels.contains(&need) {
                return Err(invalid("scheme", format!("missing level {}", need.label())));
            }
        }
        if self.kind == SchemeKind::Inverted && !self.levels.contains(&Level::OnePrime) {
            return Err(invalid("scheme", "inverted scheme needs |1'>"));
        }
        if self.dipoles.iter().any(|d| !d.is_finite()) {
            return Err(invalid("scheme", "dipole moments must be finite"));
        }
        if self.lifetimes.iter().flatten().any(|t| !(*t > 0.0)) {
            return Err(invalid("scheme", "lifetimes must be positive"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn index(&self, level: Level) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| *l == level)
            .ok_or_else(|| Error::UnknownTransition(format!("level {} not in scheme", level.label())))
    }

    /// Product-space indices of |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn computational_indices(&self) -> [usize; 4] {
        let n = self.len();
        let z = self.index(Level::Zero).expect("validated");
        let o = self.index(Level::One).expect("validated");
        [z * n + z, z * n + o, o * n + z, o * n + o]
    }
}

fn lifetime(q: Option<Quantity>) -> Result<Option<f64>> {
    q.map(|q| q.cgs(Dimension::Time)).transpose()
}

/// Interaction shifts and phase rates, all in rad/s.
///
/// Blockade shifts may be `f64::INFINITY`, which removes the shifted
/// configuration from the dynamics (ideal blockade).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub u_ee: f64,
    pub u_e1: f64,
    pub u_gg: f64,
    /// µ𝓔/ħ for the ground levels.
    pub dc_phase_rate_g: f64,
    /// µ_e𝓔/ħ for |e⟩.
    pub dc_phase_rate_e: f64,
    /// Σ_j µ²/(r_j³ħ) over spectator molecules.
    pub lattice_sum_rate: f64,
    /// µ²/(r³ħ) between control and target.
    pub pair_rate: f64,
}

impl InteractionSpec {
    pub fn blockade(u_ee: f64) -> Self {
        Self { u_ee, ..Self::default() }
    }

    /// Rates that make the accumulated phases over `t_2pi` equal
    /// Φ_c = Φ_t = `phi_ct` and Φ̃_t = `phi_t_tilde`.
    pub fn from_table_phases(phi_ct: f64, phi_t_tilde: f64, t_2pi: f64) -> Self {
        Self { dc_phase_rate_g: phi_ct / t_2pi, dc_phase_rate_e: (phi_t_tilde - phi_ct) / t_2pi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("u_ee", self.u_ee), ("u_e1", self.u_e1), ("u_gg", self.u_gg)] {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(invalid(name, "must be finite or +inf"));
            }
        }
        for (name, v) in [
            ("dc_phase_rate_g", self.dc_phase_rate_g),
            ("dc_phase_rate_e", self.dc_phase_rate_e),
            ("lattice_sum_rate", self.lattice_sum_rate),
            ("pair_rate", self.pair_rate),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Phase rate of a configuration with both molecules in ground levels.
    fn rate_ground_ground(&self) -> f64 {
        2.0 * (self.lattice_sum_rate + self.dc_phase_rate_g)
    }

    /// Phase rate with exactly one molecule in |e⟩.
    fn rate_one_excited(&self) -> f64 {
        self.lattice_sum_rate - self.pair_rate + self.dc_phase_rate_g + self.dc_phase_rate_e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Molecule {
    Control,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    Pi,
    TwoPi,
    /// Arbitrary area.
    Free,
    /// Instantaneous population transfer with efficiency η.
    IdealTransfer {
        efficiency: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub target: Molecule,
    /// Coupled levels; the second one receives the detuning term.
    pub transition: (Level, Level),
    /// rad/s
    pub rabi: f64,
    /// s; zero for ideal transfers
    pub duration: f64,
    /// rad/s
    pub detuning: f64,
    /// rad
    pub phase: f64,
    pub kind: PulseKind,
}

impl PulseSpec {
    pub fn pi(target: Molecule, from: Level, to: Level, rabi: Quantity) -> Result<Self> {
        Self::with_area(target, from, to, rabi, PI, PulseKind::Pi)
    }

    pub fn two_pi(target: Molecule, from: Level, to: Level, rabi: Quantity) -> Result<Self> {
        Self::with_area(target, from, to, rabi, 2.0 * PI, PulseKind::TwoPi)
    }

    fn with_area(target: Molecule, from: Level, to: Level, rabi: Quantity, area: f64, kind: PulseKind) -> Result<Self> {
        let omega = rabi.cgs(Dimension::AngularFrequency)?;
        if !(omega > 0.0) {
            return Err(invalid("rabi", "must be positive"));
        }
        let p = Self {
            target,
            transition: (from, to),
            rabi: omega,
            duration: area / omega,
            detuning: 0.0,
            phase: 0.0,
            kind,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn free(
        target: Molecule,
        transition: (Level, Level),
        rabi: f64,
        duration: f64,
        detuning: f64,
        phase: f64,
    ) -> Result<Self> {
        let p = Self { target, transition, rabi, duration, detuning, phase, kind: PulseKind::Free };
        p.validate()?;
        Ok(p)
    }

    pub fn ideal_transfer(target: Molecule, from: Level, to: Level, efficiency: f64) -> Result<Self> {
        let p = Self {
            target,
            transition: (from, to),
            rabi: 0.0,
            duration: 0.0,
            detuning: 0.0,
            phase: 0.0,
            kind: PulseKind::IdealTransfer { efficiency },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.transition.0 == self.transition.1 {
            return Err(Error::UnknownTransition(format!("{0} -> {0}", self.transition.0.label())));
        }
        if !self.detuning.is_finite() || !self.phase.is_finite() {
            return Err(invalid("pulse", "detuning and phase must be finite"));
        }
        if let PulseKind::IdealTransfer { efficiency } = self.kind {
            if !(efficiency > 0.0 && efficiency <= 1.0) {
                return Err(invalid("efficiency", "must lie in (0, 1]"));
            }
            return Ok(());
        }
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(invalid("rabi", "must be finite and >= 0"));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(invalid("duration", "must be positive"));
        }
        let area = self.rabi * self.duration;
        let want = match self.kind {
            PulseKind::Pi => Some(PI),
            PulseKind::TwoPi => Some(2.0 * PI),
            _ => None,
        };
        if let Some(w) = want {
            if (area - w).abs() > 1e-12 * w {
                return Err(invalid("duration", format!("pulse area {area} should be {w}")));
            }
        }
        Ok(())
    }
}

fn config_shifts(scheme: &LevelScheme, inter: &InteractionSpec, interactions_on: bool) -> Vec<f64> {
    let n = scheme.len();
    let mut shifts = vec![0.0; n * n];
    if !interactions_on {
        return shifts;
    }
    for (c, &lc) in scheme.levels.iter().enumerate() {
        for (t, &lt) in scheme.levels.iter().enumerate() {
            let (ec, et) = (lc == Level::Excited, lt == Level::Excited);
            shifts[c * n + t] = match scheme.kind {
                SchemeKind::Direct => {
                    let dc = |e: bool| if e { inter.dc_phase_rate_e } else { inter.dc_phase_rate_g };
                    let pair = match (ec, et) {
                        (true, true) => inter.u_ee,
                        (true, false) if lt == Level::One => inter.u_e1,
                        (false, true) if lc == Level::One => inter.u_e1,
                        (false, false) => inter.u_gg,
                        _ => 0.0,
                    };
                    pair - dc(ec) - dc(et)
                }
                // shifts of the target transition; target-ground configurations
                // are the reference
                SchemeKind::Inverted => match (ec, et) {
                    (false, true) => inter.u_gg,
                    (true, true) => inter.u_ee - inter.u_e1,
                    _ => 0.0,
                },
            };
        }
    }
    shifts
}

fn config(n: usize, mol: Molecule, own: usize, other: usize) -> usize {
    match mol {
        Molecule::Control => own * n + other,
        Molecule::Target => other * n + own,
    }
}

/// Rotating-frame Hamiltonian (rad/s) with the given pulses on simultaneously.
pub fn build_hamiltonian(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    pulses: &[PulseSpec],
    interactions_on: bool,
) -> Result<DMatrix<C64>> {
    scheme.validate()?;
    inter.validate()?;
    let n = scheme.len();
    let shifts = config_shifts(scheme, inter, interactions_on);
    let blocked: Vec<bool> = shifts.iter().map(|s| s.is_infinite()).collect();
    let mut h = DMatrix::from_element(n * n, n * n, ZERO);
    for (k, s) in shifts.iter().enumerate() {
        if !blocked[k] {
            h[(k, k)] += C64::from(*s);
        }
    }
    for p in pulses {
        p.validate()?;
        if matches!(p.kind, PulseKind::IdealTransfer { .. }) {
            return Err(invalid("pulses", "ideal transfers have no Hamiltonian"));
        }
        let a = scheme.index(p.transition.0)?;
        let b = scheme.index(p.transition.1)?;
        let coupling = -0.5 * p.rabi * C64::from_polar(1.0, p.phase);
        for other in 0..n {
            let ka = config(n, p.target, a, other);
            let kb = config(n, p.target, b, other);
            if blocked[ka] || blocked[kb] {
                continue;
            }
            h[(kb, ka)] += coupling;
            h[(ka, kb)] += coupling.conj();
            h[(kb, kb)] -= C64::from(p.detuning);
        }
    }
    Ok(h)
}

fn add_decay(h: &mut DMatrix<C64>, scheme: &LevelScheme) {
    let n = scheme.len();
    for c in 0..n {
        for t in 0..n {
            let gamma: f64 = [c, t].iter().filter_map(|&l| scheme.lifetimes[l]).map(|tau| 1.0 / tau).sum();
            h[(c * n + t, c * n + t)] -= C64::new(0.0, gamma / 2.0);
        }
    }
}

fn transfer_unitary(scheme: &LevelScheme, p: &PulseSpec) -> Result<DMatrix<C64>> {
    let PulseKind::IdealTransfer { efficiency } = p.kind else {
        return Err(invalid("pulse", "not a transfer"));
    };
    let n = scheme.len();
    let a = scheme.index(p.transition.0)?;
    let b = scheme.index(p.transition.1)?;
    let (s, r) = (efficiency.sqrt(), (1.0 - efficiency).sqrt());
    let mut single = DMatrix::<C64>::identity(n, n);
    single[(a, a)] = C64::from(r);
    single[(b, b)] = C64::from(r);
    single[(b, a)] = C64::from(s);
    single[(a, b)] = C64::from(-s);
    let id = DMatrix::<C64>::identity(n, n);
    Ok(match p.target {
        Molecule::Control => single.kronecker(&id),
        Molecule::Target => id.kronecker(&single),
    })
}

fn is_hermitian(h: &DMatrix<C64>) -> bool {
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    (h - h.adjoint()).iter().all(|z| z.norm() <= 1e-14 * scale)
}

/// exp(−iH·dt), by eigendecomposition when H is Hermitian.
pub fn step_unitary(h: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    if is_hermitian(h) {
        let eig = SymmetricEigen::new(h.clone());
        let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * dt));
        &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
    } else {
        (h * C64::new(0.0, -dt)).exp()
    }
}

/// A piece of a propagation: constant Hamiltonian for a duration, or an
/// instantaneous unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Evolve { hamiltonian: DMatrix<C64>, duration: f64 },
    Instant(DMatrix<C64>),
}

/// Propagate `psi0` through `segments`; each evolution is split into equal
/// steps no longer than `dt_max`.
pub fn propagate(segments: &[Segment], psi0: &DVector<C64>, dt_max: f64) -> Result<DVector<C64>> {
    let norm2 = psi0.norm_squared();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm2));
    }
    if !(dt_max > 0.0) {
        return Err(invalid("dt_max", "must be positive"));
    }
    let mut psi = psi0.clone();
    for seg in segments {
        match seg {
            Segment::Evolve { hamiltonian, duration } => {
                if hamiltonian.nrows() != psi.len() || hamiltonian.ncols() != psi.len() {
                    return Err(invalid("segments", "Hamiltonian does not match state size"));
                }
                if !(*duration >= 0.0) {
                    return Err(invalid("duration", "must be non-negative"));
                }
                let steps = ((duration / dt_max).ceil() as usize).max(1);
                let u = step_unitary(hamiltonian, duration / steps as f64);
                for _ in 0..steps {
                    psi = &u * psi;
                }
            }
            Segment::Instant(u) => psi = u * psi,
        }
    }
    Ok(psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceStep {
    pub pulse: PulseSpec,
    /// Whether field-induced interactions and phase rates act during the step.
    pub interactions: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseSequence {
    pub steps: Vec<SequenceStep>,
}

impl PulseSequence {
    pub fn push(&mut self, pulse: PulseSpec, interactions: bool) -> &mut Self {
        self.steps.push(SequenceStep { pulse, interactions });
        self
    }

    pub fn duration(&self) -> f64 {
        self.steps.iter().map(|s| s.pulse.duration).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Include non-Hermitian loss from level lifetimes.
    pub decay: bool,
    /// Sub-steps per pulse used for phase bookkeeping and transient tracking.
    pub substeps: usize,
    /// Efficiency of the |1⟩ ↔ |1′⟩ transfers in the inverted scheme.
    pub transfer_efficiency: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { decay: false, substeps: 64, transfer_efficiency: 1.0 }
    }
}

/// Full product-space propagator of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceOutcome {
    pub unitary: DMatrix<C64>,
    /// Peak target-excited population during target pulses, per column.
    pub transient_excitation: Vec<f64>,
}

/// Propagate every basis column through `seq`.
///
/// In the inverted scheme the field-induced phases (Φ_c, Φ_t, Φ̃_t) are
/// accumulated per input column as the population-weighted integral of the
/// configuration rates, with the trapezoid rule over `substeps` intervals.
pub fn run_sequence(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    seq: &PulseSequence,
    opts: &RunOptions,
) -> Result<SequenceOutcome> {
    scheme.validate()?;
    inter.validate()?;
    if opts.substeps < 2 {
        return Err(invalid("substeps", "at least 2 are required"));
    }
    let n = scheme.len();
    let d = n * n;
    let e = scheme.index(Level::Excited)?;
    let target_excited: Vec<bool> = (0..d).map(|k| k % n == e).collect();
    let n_excited: Vec<usize> = (0..d).map(|k| (k / n == e) as usize + (k % n == e) as usize).collect();

    let mut u = DMatrix::<C64>::identity(d, d);
    let mut phases = vec![0.0; d];
    let mut transient = vec![0.0f64; d];

    for step in &seq.steps {
        let p = &step.pulse;
        if matches!(p.kind, PulseKind::IdealTransfer { .. }) {
            u = transfer_unitary(scheme, p)? * u;
            continue;
        }
        let mut h = build_hamiltonian(scheme, inter, std::slice::from_ref(p), step.interactions)?;
        if opts.decay {
            add_decay(&mut h, scheme);
        }
        let m = opts.substeps;
        let dt = p.duration / m as f64;
        let us = step_unitary(&h, dt);

        let bookkeeping = step.interactions && scheme.kind == SchemeKind::Inverted;
        let rates: Vec<f64> = n_excited
            .iter()
            .map(|&k| match k {
                0 => inter.rate_ground_ground(),
                1 => inter.rate_one_excited(),
                _ => 0.0,
            })
            .collect();
        let weighted =
            |u: &DMatrix<C64>, col: usize| -> f64 { (0..d).map(|k| u[(k, col)].norm_sqr() * rates[k]).sum() };
        let target_pop = |u: &DMatrix<C64>, col: usize| -> f64 {
            (0..d).filter(|&k| target_excited[k]).map(|k| u[(k, col)].norm_sqr()).sum()
        };

        for j in 0..m {
            if bookkeeping {
                let w = if j == 0 { 0.5 } else { 1.0 };
                for (col, ph) in phases.iter_mut().enumerate() {
                    *ph += w * dt * weighted(&u, col);
                }
            }
            u = &us * u;
            if p.target == Molecule::Target {
                for (col, tr) in transient.iter_mut().enumerate() {
                    *tr = tr.max(target_pop(&u, col));
                }
            }
        }
        if bookkeeping {
            for (col, ph) in phases.iter_mut().enumerate() {
                *ph += 0.5 * dt * weighted(&u, col);
            }
        }
    }

    for (col, ph) in phases.iter().enumerate() {
        let f = C64::from_polar(1.0, *ph);
        for k in 0..d {
            u[(k, col)] *= f;
        }
    }
    Ok(SequenceOutcome { unitary: u, transient_excitation: transient })
}

/// Simulated gate restricted to the computational basis
/// {|00⟩, |01⟩, |10⟩, |11⟩}, control first.
#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub basis_map: Matrix4<C64>,
    /// arg of the diagonal elements.
    pub phases: [f64; 4],
    /// Phases relative to the ideal gate's diagonal.
    pub residual_phases: [f64; 4],
    /// Population leaving the computational subspace, per input state.
    pub leakage: [f64; 4],
    pub fidelity: f64,
    pub ideal: Matrix4<C64>,
    /// Peak target-excited population during target pulses, per input state.
    pub transient_excitation: [f64; 4],
    /// Sequence duration, s.
    pub duration: f64,
    full: DMatrix<C64>,
    comp: [usize; 4],
}

impl GateResult {
    fn new(outcome: SequenceOutcome, comp: [usize; 4], ideal: Matrix4<C64>, duration: f64) -> Self {
        let full = outcome.unitary;
        let basis_map = Matrix4::from_fn(|i, j| full[(comp[i], comp[j])]);
        let phases = std::array::from_fn(|k| basis_map[(k, k)].arg());
        let residual_phases = std::array::from_fn(|k| (basis_map[(k, k)] / ideal[(k, k)]).arg());
        let leakage = std::array::from_fn(|j| 1.0 - (0..4).map(|i| basis_map[(i, j)].norm_sqr()).sum::<f64>());
        let transient_excitation = std::array::from_fn(|k| outcome.transient_excitation[comp[k]]);
        Self {
            fidelity: fidelity(&basis_map, &ideal),
            basis_map,
            phases,
            residual_phases,
            leakage,
            ideal,
            transient_excitation,
            duration,
            full,
            comp,
        }
    }

    /// The full product-space propagator.
    pub fn full_unitary(&self) -> &DMatrix<C64> {
        &self.full
    }

    /// Repeat the gate, comparing with the same power of its ideal.
    pub fn repeat(&self, times: usize) -> Self {
        let mut ideal = Matrix4::<C64>::identity();
        for _ in 0..times {
            ideal *= self.ideal;
        }
        self.repeated(times, ideal)
    }

    /// Run this gate `times` times in a row (full propagators composed).
    pub fn repeated(&self, times: usize, ideal: Matrix4<C64>) -> Self {
        let d = self.full.nrows();
        let mut full = DMatrix::<C64>::identity(d, d);
        for _ in 0..times {
            full = &self.full * full;
        }
        // transient excitation carries over from a single run
        let mut transient = vec![0.0; d];
        for (k, &c) in self.comp.iter().enumerate() {
            transient[c] = self.transient_excitation[k];
        }
        GateResult::new(
            SequenceOutcome { unitary: full, transient_excitation: transient },
            self.comp,
            ideal,
            self.duration * times as f64,
        )
    }
}

/// Plain-number view of a [`GateResult`] for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    /// |U_ij| on the computational basis.
    pub magnitude: [[f64; 4]; 4],
    /// arg U_ij, rad.
    pub phase: [[f64; 4]; 4],
    pub phases: [f64; 4],
    pub residual_phases: [f64; 4],
    pub leakage: [f64; 4],
    pub fidelity: f64,
    pub transient_excitation: [f64; 4],
    /// s
    pub duration: f64,
}

impl GateResult {
    pub fn summary(&self) -> GateSummary {
        GateSummary {
            magnitude: std::array::from_fn(|i| std::array::from_fn(|j| self.basis_map[(i, j)].norm())),
            phase: std::array::from_fn(|i| std::array::from_fn(|j| self.basis_map[(i, j)].arg())),
            phases: self.phases,
            residual_phases: self.residual_phases,
            leakage: self.leakage,
            fidelity: self.fidelity,
            transient_excitation: self.transient_excitation,
            duration: self.duration,
        }
    }
}

fn fidelity(actual: &Matrix4<C64>, ideal: &Matrix4<C64>) -> f64 {
    ((ideal.adjoint() * actual).trace().norm_sqr() / 16.0).clamp(0.0, 1.0)
}

/// |Tr(ideal†·U)|²/16; insensitive to a global phase.
pub fn gate_fidelity(actual: &GateResult, ideal: &Matrix4<C64>) -> Result<f64> {
    let check = ideal.adjoint() * ideal - Matrix4::<C64>::identity();
    if check.iter().any(|z| z.norm() > 1e-9) {
        return Err(invalid("ideal", "must be unitary"));
    }
    Ok(fidelity(&actual.basis_map, ideal))
}

pub fn diag4(d: [C64; 4]) -> Matrix4<C64> {
    Matrix4::from_diagonal(&d.into())
}

/// diag(1, −1, −1, −1).
pub fn ideal_direct() -> Matrix4<C64> {
    diag4([ONE, -ONE, -ONE, -ONE])
}

/// diag(1, 1, 1, i): one pass of the inverted sequence.
pub fn ideal_inverted_half() -> Matrix4<C64> {
    diag4([ONE, ONE, ONE, I])
}

/// diag(1, 1, 1, −1).
pub fn ideal_phase_gate() -> Matrix4<C64> {
    diag4([ONE, ONE, ONE, -ONE])
}

fn rabi(q: Quantity, name: &'static str) -> Result<Quantity> {
    let v = q.cgs(Dimension::AngularFrequency)?;
    if !(v > 0.0) {
        return Err(invalid(name, "must be positive"));
    }
    Ok(q)
}

/// π_c, 2π_t, π_c on the |1⟩ ↔ |e⟩ transitions.
pub fn direct_sequence(omega_pi: Quantity, omega_2pi: Quantity) -> Result<PulseSequence> {
    let pi = PulseSpec::pi(Molecule::Control, Level::One, Level::Excited, rabi(omega_pi, "omega_pi")?)?;
    let two = PulseSpec::two_pi(Molecule::Target, Level::One, Level::Excited, rabi(omega_2pi, "omega_2pi")?)?;
    let mut s = PulseSequence::default();
    s.push(pi, true).push(two, true).push(pi, true);
    Ok(s)
}

pub fn run_direct_gate(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
) -> Result<GateResult> {
    run_direct_gate_with(scheme, inter, omega_pi, omega_2pi, &RunOptions::default())
}

pub fn run_direct_gate_with(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
    opts: &RunOptions,
) -> Result<GateResult> {
    if scheme.kind != SchemeKind::Direct {
        return Err(invalid("scheme", "direct gate needs a direct level scheme"));
    }
    let seq = direct_sequence(omega_pi, omega_2pi)?;
    let out = run_sequence(scheme, inter, &seq, opts)?;
    Ok(GateResult::new(out, scheme.computational_indices(), ideal_direct(), seq.duration()))
}

/// The rotational scheme runs the direct protocol with |e⟩ the dressed |+⟩
/// level and `u_ee` the dipole coupling V_dip.
pub fn run_rotational_gate(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
) -> Result<GateResult> {
    run_direct_gate(scheme, inter, omega_pi, omega_2pi)
}

/// Transfer_c, π_c, transfer_t, 2π_t, π_c, transfer back on both. The field is
/// on only during 2π_t.
pub fn inverted_sequence(
    omega_pi: Quantity,
    omega_2pi: Quantity,
    dc_on_during_2pi: bool,
    efficiency: f64,
) -> Result<PulseSequence> {
    use Level::*;
    use Molecule::*;
    let pi = PulseSpec::pi(Control, OnePrime, Excited, rabi(omega_pi, "omega_pi")?)?;
    let two = PulseSpec::two_pi(Target, OnePrime, Excited, rabi(omega_2pi, "omega_2pi")?)?;
    let up = |m| PulseSpec::ideal_transfer(m, One, OnePrime, efficiency);
    let down = |m| PulseSpec::ideal_transfer(m, OnePrime, One, efficiency);
    let mut s = PulseSequence::default();
    s.push(up(Control)?, false)
        .push(pi, false)
        .push(up(Target)?, false)
        .push(two, dc_on_during_2pi)
        .push(pi, false)
        .push(down(Control)?, false)
        .push(down(Target)?, false);
    Ok(s)
}

pub fn run_inverted_gate(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
    dc_on_during_2pi: bool,
) -> Result<GateResult> {
    run_inverted_gate_with(scheme, inter, omega_pi, omega_2pi, dc_on_during_2pi, &RunOptions::default())
}

pub fn run_inverted_gate_with(
    scheme: &LevelScheme,
    inter: &InteractionSpec,
    omega_pi: Quantity,
    omega_2pi: Quantity,
    dc_on_during_2pi: bool,
    opts: &RunOptions,
) -> Result<GateResult> {
    if scheme.kind != SchemeKind::Inverted {
        return Err(invalid("scheme", "inverted gate needs an inverted level scheme"));
    }
    let seq = inverted_sequence(omega_pi, omega_2pi, dc_on_during_2pi, opts.transfer_efficiency)?;
    let out = run_sequence(scheme, inter, &seq, opts)?;
    Ok(GateResult::new(out, scheme.computational_indices(), ideal_inverted_half(), seq.duration()))
}

/// T = 2π/Ω_π + 2π/Ω_2π.
pub fn gate_time(omega_pi: Quantity, omega_2pi: Quantity) -> Result<Quantity> {
    let a = rabi(omega_pi, "omega_pi")?.base_value();
    let b = rabi(omega_2pi, "omega_2pi")?.base_value();
    Quantity::new(2.0 * PI / a + 2.0 * PI / b, Unit::Second)
}

/// T = 2·T_π + T_2π from pulse durations.
pub fn gate_time_from_durations(t_pi: Quantity, t_2pi: Quantity) -> Result<Quantity> {
    let a = t_pi.cgs(Dimension::Time)?;
    let b = t_2pi.cgs(Dimension::Time)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(invalid("durations", "must be positive"));
    }
    Quantity::new(2.0 * a + b, Unit::Second)
}

/// T_π = π/Ω.
pub fn pi_duration(omega: Quantity) -> Result<Quantity> {
    Quantity::new(PI / rabi(omega, "omega")?.base_value(), Unit::Second)
}

/// T_2π = 2π/Ω.
pub fn two_pi_duration(omega: Quantity) -> Result<Quantity> {
    Quantity::new(2.0 * PI / rabi(omega, "omega")?.base_value(), Unit::Second)
}
