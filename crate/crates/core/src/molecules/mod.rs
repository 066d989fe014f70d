//! Molecule presets and structure calculators.

pub mod angular;
pub mod hyperfine;

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::{consts, convert, Dimension, Quantity, Unit};

pub use angular::HalfInt;
pub use hyperfine::{HyperfineLevel, SpinRotorConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Stated with the reference parameter set.
    Reference,
    /// Taken from outside the reference set.
    ExternalLiterature,
    /// Assumed by analogy with other molecules.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Param {
    #[serde(flatten)]
    pub quantity: Quantity,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineConstants {
    pub gamma_sr: Param,
    pub b_f: Param,
    pub c: Param,
    pub eqq: Param,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub note: String,
    pub mu_ground: Param,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_excited: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_transition_induced: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excited_lifetime: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition_wavelength: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_wavelength: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotational_constant: Option<Param>,
    #[serde(default)]
    pub electron_spin: HalfInt,
    #[serde(default)]
    pub nuclear_spins: Vec<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperfine: Option<HyperfineConstants>,
    /// Linear Zeeman scale per gauss.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeeman_ground: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeeman_excited: Option<Param>,
}

impl Default for HalfInt {
    fn default() -> Self {
        HalfInt::ZERO
    }
}

impl MoleculeParams {
    pub fn validate(&self) -> Result<()> {
        let check = |p: &Option<Param>, dim: Dimension, name: &'static str| -> Result<()> {
            if let Some(p) = p {
                if p.quantity.dimension() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: p.quantity.dimension() });
                }
                if !p.quantity.value().is_finite() {
                    return Err(invalid(name, "must be finite"));
                }
            }
            Ok(())
        };
        check(&Some(self.mu_ground), Dimension::DipoleMoment, "mu_ground")?;
        check(&self.mu_excited, Dimension::DipoleMoment, "mu_excited")?;
        check(&self.mu_transition_induced, Dimension::DipoleMoment, "mu_transition_induced")?;
        check(&self.excited_lifetime, Dimension::Time, "excited_lifetime")?;
        check(&self.transition_wavelength, Dimension::Length, "transition_wavelength")?;
        check(&self.lattice_wavelength, Dimension::Length, "lattice_wavelength")?;
        check(&self.rotational_constant, Dimension::Wavenumber, "rotational_constant")?;
        check(&self.zeeman_ground, Dimension::AngularFrequency, "zeeman_ground")?;
        check(&self.zeeman_excited, Dimension::AngularFrequency, "zeeman_excited")?;
        if let Some(h) = &self.hyperfine {
            for p in [h.gamma_sr, h.b_f, h.c, h.eqq] {
                check(&Some(p), Dimension::AngularFrequency, "hyperfine")?;
            }
        }
        if let Some(t) = &self.excited_lifetime {
            if !(t.quantity.value() > 0.0) {
                return Err(invalid("excited_lifetime", "must be positive"));
            }
        }
        if self.electron_spin.twice() < 0 || self.nuclear_spins.iter().any(|s| s.twice() < 0) {
            return Err(Error::AngularMomentum("spins must be non-negative".into()));
        }
        Ok(())
    }

    fn require(&self, p: Option<Param>, what: &str) -> Result<Quantity> {
        p.map(|p| p.quantity).ok_or_else(|| Error::MissingConstants(format!("{}: {what}", self.name)))
    }

    pub fn mu_excited(&self) -> Result<Quantity> {
        self.require(self.mu_excited, "mu_excited")
    }

    pub fn mu_transition_induced(&self) -> Result<Quantity> {
        self.require(self.mu_transition_induced, "mu_transition_induced")
    }

    pub fn excited_lifetime(&self) -> Result<Quantity> {
        self.require(self.excited_lifetime, "excited_lifetime")
    }

    pub fn lattice_wavelength(&self) -> Result<Quantity> {
        self.require(self.lattice_wavelength, "lattice_wavelength")
    }

    pub fn rotational_constant(&self) -> Result<Quantity> {
        self.require(self.rotational_constant, "rotational_constant")
    }
}

#[derive(Debug, Deserialize)]
struct PresetFile {
    version: u32,
    molecules: Vec<MoleculeParams>,
}

const PRESET_DATA: &str = include_str!("../../data/molecules.json");

fn presets() -> &'static [MoleculeParams] {
    static P: OnceLock<Vec<MoleculeParams>> = OnceLock::new();
    P.get_or_init(|| {
        let f: PresetFile = serde_json::from_str(PRESET_DATA).expect("shipped preset file parses");
        assert_eq!(f.version, 1, "unsupported preset file version");
        for m in &f.molecules {
            m.validate().expect("shipped presets are valid");
        }
        f.molecules
    })
}

pub fn preset_names() -> Vec<&'static str> {
    presets().iter().map(|m| m.name.as_str()).collect()
}

/// Look up a preset by name or alias, case-insensitively.
pub fn preset(name: &str) -> Result<MoleculeParams> {
    let key = name.trim().to_ascii_lowercase();
    presets()
        .iter()
        .find(|m| m.name.to_ascii_lowercase() == key || m.aliases.contains(&key))
        .cloned()
        .ok_or_else(|| Error::UnknownPreset { name: name.to_string(), known: preset_names().join(", ") })
}

/// Casimir function
/// [3C(C+1)/4 − I(I+1)J(J+1)] / [2I(2I−1)(2J−1)(2J+3)],
/// C = F(F+1) − I(I+1) − J(J+1). Returns 0 at J = 0, where the quadrupole
/// coupling vanishes.
pub fn casimir_f(i: f64, j: f64, f: f64) -> Result<f64> {
    let (ih, jh, fh) = (HalfInt::new(i)?, HalfInt::new(j)?, HalfInt::new(f)?);
    if ih.twice() < 0 || fh.twice() < 0 {
        return Err(Error::AngularMomentum("I and F must be non-negative".into()));
    }
    if jh.twice() < 0 || !jh.is_integer() {
        return Err(Error::AngularMomentum(format!("J = {j} must be a non-negative integer")));
    }
    if !HalfInt::couple(jh, ih).any(|x| x == fh) {
        return Err(Error::AngularMomentum(format!("F = {f} cannot couple I = {i} and J = {j}")));
    }
    if ih.twice() < 2 {
        return Err(Error::NoQuadrupole(i));
    }
    if jh.twice() == 0 {
        return Ok(0.0);
    }
    let c = f * (f + 1.0) - i * (i + 1.0) - j * (j + 1.0);
    Ok((0.75 * c * (c + 1.0) - i * (i + 1.0) * j * (j + 1.0))
        / (2.0 * i * (2.0 * i - 1.0) * (2.0 * j - 1.0) * (2.0 * j + 3.0)))
}

/// Rotational, fine and hyperfine levels of a ²Σ molecule up to `n_max`.
pub fn hyperfine_levels(m: &MoleculeParams, n_max: u32) -> Result<Vec<HyperfineLevel>> {
    let missing = |what: &str| Error::MissingConstants(format!("{}: {what}", m.name));
    if m.electron_spin != HalfInt::HALF {
        return Err(missing("electron spin 1/2"));
    }
    let hf = m.hyperfine.ok_or_else(|| missing("hyperfine constants"))?;
    let b = m.rotational_constant()?;
    let spins: Vec<HalfInt> = m.nuclear_spins.iter().copied().filter(|s| s.twice() > 0).collect();
    let [i] = spins[..] else {
        return Err(missing("exactly one non-zero nuclear spin"));
    };
    let mhz = |p: Param| p.quantity.in_unit(Unit::Megahertz);
    let k = SpinRotorConstants {
        b_rot: convert(b, Unit::Megahertz)?.value(),
        gamma_sr: mhz(hf.gamma_sr)?,
        b_f: mhz(hf.b_f)?,
        c: mhz(hf.c)?,
        eqq: mhz(hf.eqq)?,
    };
    hyperfine::spin_rotor_levels(&k, m.electron_spin, i, n_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedStates {
    /// rad/s
    pub shift_plus: f64,
    /// rad/s
    pub shift_minus: f64,
    /// α with tan 2α = 2Ω/δ; π/4 on resonance.
    pub mixing_angle: f64,
}

/// Eigenvalues of [[0, Ω], [Ω, δ]] measured from the undressed level.
pub fn dressed_states(omega_coupl: Quantity, detuning: Quantity) -> Result<DressedStates> {
    let om = omega_coupl.cgs(Dimension::AngularFrequency)?;
    let d = detuning.cgs(Dimension::AngularFrequency)?;
    if om < 0.0 {
        return Err(invalid("omega_coupl", "must be non-negative"));
    }
    let r = (0.25 * d * d + om * om).sqrt();
    Ok(DressedStates { shift_plus: 0.5 * d + r, shift_minus: 0.5 * d - r, mixing_angle: 0.5 * (2.0 * om).atan2(d) })
}

/// Natural linewidth A = 4µ²(2π)³/(3λ³ħ) of a rotational level.
pub fn rotational_linewidth(mu: Quantity, lambda_mw: Quantity) -> Result<Quantity> {
    let mu = mu.cgs(Dimension::DipoleMoment)?;
    let l = lambda_mw.cgs(Dimension::Length)?;
    if !(mu > 0.0 && l > 0.0) {
        return Err(invalid("rotational_linewidth", "µ and λ must be positive"));
    }
    Quantity::new(4.0 * mu * mu * (2.0 * PI).powi(3) / (3.0 * l.powi(3) * consts::HBAR), Unit::RadPerSecond)
}

/// Whether the rotational linewidth A reaches the resonant exchange rate
/// µ²/(r³ħ) at separation `r`.
pub fn linewidth_exceeds_exchange(mu: Quantity, lambda_mw: Quantity, r: Quantity) -> Result<bool> {
    let a = rotational_linewidth(mu, lambda_mw)?.base_value();
    let m = mu.base_value();
    let r = r.cgs(Dimension::Length)?;
    if !(r > 0.0) {
        return Err(invalid("r", "must be positive"));
    }
    Ok(a >= m * m / (r.powi(3) * consts::HBAR))
}

/// Static field 𝓔 = 2Bħ/µ that mixes the lowest two rotational levels.
pub fn stark_mixing_field(b: Quantity, mu: Quantity) -> Result<Quantity> {
    let omega = convert(b, Unit::RadPerSecond)?.value();
    let mu = mu.cgs(Dimension::DipoleMoment)?;
    if !(omega > 0.0 && mu > 0.0) {
        return Err(invalid("stark_mixing_field", "B and µ must be positive"));
    }
    Quantity::new(2.0 * omega * consts::HBAR / mu, Unit::StatvoltPerCm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeemanState {
    Ground,
    Excited,
}

/// Linear Zeeman shift, returned in the preset's frequency unit.
pub fn zeeman_shift(m: &MoleculeParams, state: ZeemanState, b_field: Quantity) -> Result<Quantity> {
    let b = b_field.in_unit(Unit::Gauss)?;
    if b < 0.0 {
        return Err(invalid("b_field", "must be non-negative"));
    }
    let scale = match state {
        ZeemanState::Ground => m.require(m.zeeman_ground, "zeeman_ground")?,
        ZeemanState::Excited => m.require(m.zeeman_excited, "zeeman_excited")?,
    };
    Quantity::new(scale.value() * b, scale.unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(v: f64, u: Unit) -> Quantity {
        Quantity::new(v, u).unwrap()
    }

    #[test]
    fn presets_load() {
        let co = preset("CO-13").unwrap();
        assert_eq!(co.mu_excited().unwrap(), q(1.37, Unit::Debye));
        assert_eq!(co.excited_lifetime().unwrap(), q(0.5, Unit::Second));
        let lics = preset("lics").unwrap();
        assert_eq!(lics.mu_ground.quantity, q(5.5, Unit::Debye));
        assert_eq!(lics.mu_excited().unwrap(), q(-0.45, Unit::Debye));
        let bai = preset("BaI").unwrap();
        assert_relative_eq!(
            bai.hyperfine.unwrap().gamma_sr.quantity.in_unit(Unit::Megahertz).unwrap(),
            75.85,
            max_relative = 1e-14
        );
        assert_eq!(bai.rotational_constant.unwrap().provenance, Provenance::ExternalLiterature);
        assert_eq!(preset_names().len(), 8);
    }

    #[test]
    fn unknown_preset_lists_known() {
        match preset("HCl") {
            Err(Error::UnknownPreset { known, .. }) => assert!(known.contains("BaI")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn presets_round_trip_through_json() {
        for name in preset_names() {
            let m = preset(name).unwrap();
            let s = serde_json::to_string(&m).unwrap();
            let back: MoleculeParams = serde_json::from_str(&s).unwrap();
            assert_eq!(m, back);
        }
    }

    #[test]
    fn casimir_values() {
        assert_eq!(casimir_f(2.5, 0.0, 2.5).unwrap(), 0.0);
        assert_relative_eq!(casimir_f(2.5, 1.0, 3.5).unwrap(), 0.05, epsilon = 1e-15);
        assert!(matches!(casimir_f(0.5, 1.0, 1.5), Err(Error::NoQuadrupole(_))));
        assert!(matches!(casimir_f(2.5, 0.5, 3.0), Err(Error::AngularMomentum(_))));
        assert!(matches!(casimir_f(2.5, 0.0, 1.5), Err(Error::AngularMomentum(_))));
    }

    #[test]
    fn bai_ground_rotor_has_two_levels() {
        let lv = hyperfine_levels(&preset("BaI").unwrap(), 0).unwrap();
        assert_eq!(lv.len(), 2);
        assert_eq!(lv[0].f, HalfInt::int(2));
        assert_eq!(lv[1].f, HalfInt::int(3));
        assert_eq!(lv.iter().map(|l| l.degeneracy).sum::<u32>(), 12);
        let x = 93.117 + 52.17 / 3.0;
        assert_relative_eq!(lv[0].energy, -1.75 * x, epsilon = 1e-9);
        assert_relative_eq!(lv[1].energy, 1.25 * x, epsilon = 1e-9);
    }

    #[test]
    fn hyperfine_needs_constants() {
        assert!(matches!(hyperfine_levels(&preset("SrI").unwrap(), 0), Err(Error::MissingConstants(_))));
        assert!(matches!(hyperfine_levels(&preset("LiCs").unwrap(), 0), Err(Error::MissingConstants(_))));
    }

    #[test]
    fn dressed_state_examples() {
        let zero = q(0.0, Unit::RadPerSecond);
        let d = dressed_states(q(3e7, Unit::RadPerSecond), zero).unwrap();
        assert_eq!((d.shift_plus, d.shift_minus), (3e7, -3e7));
        assert_relative_eq!(d.mixing_angle, PI / 4.0);
        let d = dressed_states(zero, q(5e6, Unit::RadPerSecond)).unwrap();
        assert_eq!((d.shift_plus, d.shift_minus, d.mixing_angle), (5e6, 0.0, 0.0));
    }

    #[test]
    fn linewidth_value() {
        let a = rotational_linewidth(q(6.0, Unit::Debye), q(1.0, Unit::Cm)).unwrap().value();
        let hand = 4.0 * 36e-36 * 248.050213 / (3.0 * 1.054571817e-27);
        assert_relative_eq!(a, hand, max_relative = 1e-8);
        assert!((a - 1.129e-5).abs() < 1e-8, "{a}");
        let mm = rotational_linewidth(q(6.0, Unit::Debye), q(1.0, Unit::Millimeter)).unwrap().value();
        assert!((mm - 1.13e-2).abs() < 1e-4, "{mm}");
    }

    #[test]
    fn exchange_comparison() {
        let mu = q(6.0, Unit::Debye);
        let lam = q(1.0, Unit::Cm);
        assert!(linewidth_exceeds_exchange(mu, lam, q(1.0, Unit::Cm)).unwrap());
        assert!(linewidth_exceeds_exchange(mu, lam, q(0.5, Unit::Cm)).unwrap());
        assert!(!linewidth_exceeds_exchange(mu, lam, q(10.0, Unit::Micrometer)).unwrap());
    }

    #[test]
    fn stark_field_lics() {
        let e = stark_mixing_field(q(0.1935, Unit::PerCm), q(5.5, Unit::Debye)).unwrap();
        let kv = e.in_unit(Unit::KilovoltPerCm).unwrap();
        assert!((kv - 4.19).abs() < 0.01, "{kv}");
    }

    #[test]
    fn zeeman_co() {
        let co = preset("co").unwrap();
        let g = zeeman_shift(&co, ZeemanState::Ground, q(10.0, Unit::Gauss)).unwrap();
        assert_relative_eq!(g.in_unit(Unit::Kilohertz).unwrap(), 10.0, max_relative = 1e-14);
        let e = zeeman_shift(&co, ZeemanState::Excited, q(10.0, Unit::Gauss)).unwrap();
        assert_relative_eq!(e.in_unit(Unit::Megahertz).unwrap(), 10.0, max_relative = 1e-14);
        assert_eq!(zeeman_shift(&co, ZeemanState::Ground, q(0.0, Unit::Gauss)).unwrap().value(), 0.0);
        assert!(zeeman_shift(&preset("NF").unwrap(), ZeemanState::Ground, q(1.0, Unit::Gauss)).is_err());
    }

    proptest! {
        #[test]
        fn dressed_are_eigenvalues(om in 0.0f64..1e8, d in -1e8f64..1e8) {
            let s = dressed_states(q(om, Unit::RadPerSecond), q(d, Unit::RadPerSecond)).unwrap();
            // λ² − δλ − Ω² = 0
            for l in [s.shift_plus, s.shift_minus] {
                let p = l * l - d * l - om * om;
                prop_assert!(p.abs() <= 1e-9 * (d * d + om * om).max(1.0));
            }
        }

        #[test]
        fn casimir_zero_at_j0(i2 in 2i32..12) {
            let i = i2 as f64 / 2.0;
            prop_assert_eq!(casimir_f(i, 0.0, i).unwrap(), 0.0);
        }

        #[test]
        fn stark_linear_in_b(b in 0.01f64..10.0, mu in 0.1f64..10.0) {
            let e1 = stark_mixing_field(q(b, Unit::PerCm), q(mu, Unit::Debye)).unwrap().value();
            let e2 = stark_mixing_field(q(2.0 * b, Unit::PerCm), q(mu, Unit::Debye)).unwrap().value();
            prop_assert!((e2 - 2.0 * e1).abs() <= 1e-12 * e2);
        }

        #[test]
        fn linewidth_cubic(l in 0.01f64..10.0) {
            let a1 = rotational_linewidth(q(6.0, Unit::Debye), q(l, Unit::Cm)).unwrap().value();
            let a2 = rotational_linewidth(q(6.0, Unit::Debye), q(2.0 * l, Unit::Cm)).unwrap().value();
            prop_assert!((a1 / a2 - 8.0).abs() < 1e-12);
        }
    }
}
