//! Physical constants and unit conversions.
//!
//! Every formula in this crate is evaluated in Gaussian-CGS: dipole moments in
//! esu·cm, fields in statvolt/cm, lengths in cm, times in s, angular
//! frequencies in rad/s. Laboratory units (Debye, V/cm, W/cm², nm, µs, G) are
//! accepted and reported through [`Quantity`], which carries a dimension tag
//! that is checked wherever a quantity crosses an operation boundary.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// CODATA 2018 constants, Gaussian-CGS.
pub mod consts {
    /// Reduced Planck constant, erg·s.
    pub const HBAR: f64 = 1.054_571_817e-27;
    /// Speed of light, cm/s.
    pub const C: f64 = 2.997_924_580_00e10;
    /// One Debye in esu·cm.
    pub const DEBYE: f64 = 1.0e-18;
    /// V/cm per statvolt/cm.
    pub const VOLT_CM_PER_STATVOLT_CM: f64 = 299.792_458;
    /// erg/(s·cm²) per W/cm².
    pub const ERG_S_CM2_PER_W_CM2: f64 = 1.0e7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    DipoleMoment,
    ElectricField,
    Intensity,
    Length,
    Time,
    AngularFrequency,
    Energy,
    MagneticField,
    Wavenumber,
    Velocity,
    Dimensionless,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::DipoleMoment => "dipole-moment",
            Dimension::ElectricField => "electric-field",
            Dimension::Intensity => "intensity",
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::AngularFrequency => "angular-frequency",
            Dimension::Energy => "energy",
            Dimension::MagneticField => "magnetic-field",
            Dimension::Wavenumber => "wavenumber",
            Dimension::Velocity => "velocity",
            Dimension::Dimensionless => "dimensionless",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    // dipole moment
    Debye,
    EsuCm,
    CoulombMeter,
    // electric field
    StatvoltPerCm,
    VoltPerCm,
    KilovoltPerCm,
    VoltPerMeter,
    // intensity
    ErgPerSecondCm2,
    WattPerCm2,
    MilliwattPerCm2,
    MicrowattPerCm2,
    // length
    Cm,
    Meter,
    Millimeter,
    Micrometer,
    Nanometer,
    // time
    Second,
    Millisecond,
    Microsecond,
    Nanosecond,
    // angular frequency; Hz-type units are cycles per second
    RadPerSecond,
    Hertz,
    Kilohertz,
    Megahertz,
    Gigahertz,
    // energy
    Erg,
    Joule,
    // magnetic field
    Gauss,
    Tesla,
    // wavenumber
    PerCm,
    // velocity
    CmPerSecond,
    MeterPerSecond,
    // plain numbers and angles
    Unitless,
    Radian,
    Degree,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Debye | EsuCm | CoulombMeter => Dimension::DipoleMoment,
            StatvoltPerCm | VoltPerCm | KilovoltPerCm | VoltPerMeter => Dimension::ElectricField,
            ErgPerSecondCm2 | WattPerCm2 | MilliwattPerCm2 | MicrowattPerCm2 => Dimension::Intensity,
            Cm | Meter | Millimeter | Micrometer | Nanometer => Dimension::Length,
            Second | Millisecond | Microsecond | Nanosecond => Dimension::Time,
            RadPerSecond | Hertz | Kilohertz | Megahertz | Gigahertz => Dimension::AngularFrequency,
            Erg | Joule => Dimension::Energy,
            Gauss | Tesla => Dimension::MagneticField,
            PerCm => Dimension::Wavenumber,
            CmPerSecond | MeterPerSecond => Dimension::Velocity,
            Unitless | Radian | Degree => Dimension::Dimensionless,
        }
    }

    /// Multiplier taking a value in this unit to the base CGS unit of its
    /// dimension.
    pub fn to_base(self) -> f64 {
        use Unit::*;
        match self {
            Debye => consts::DEBYE,
            EsuCm => 1.0,
            // 1 C·m = 1 / 3.335 640 95e-30 D
            CoulombMeter => consts::C * 10.0,
            StatvoltPerCm => 1.0,
            VoltPerCm => 1.0 / consts::VOLT_CM_PER_STATVOLT_CM,
            KilovoltPerCm => 1.0e3 / consts::VOLT_CM_PER_STATVOLT_CM,
            VoltPerMeter => 1.0e-2 / consts::VOLT_CM_PER_STATVOLT_CM,
            ErgPerSecondCm2 => 1.0,
            WattPerCm2 => consts::ERG_S_CM2_PER_W_CM2,
            MilliwattPerCm2 => consts::ERG_S_CM2_PER_W_CM2 * 1e-3,
            MicrowattPerCm2 => consts::ERG_S_CM2_PER_W_CM2 * 1e-6,
            Cm => 1.0,
            Meter => 1.0e2,
            Millimeter => 1.0e-1,
            Micrometer => 1.0e-4,
            Nanometer => 1.0e-7,
            Second => 1.0,
            Millisecond => 1.0e-3,
            Microsecond => 1.0e-6,
            Nanosecond => 1.0e-9,
            RadPerSecond => 1.0,
            Hertz => 2.0 * PI,
            Kilohertz => 2.0 * PI * 1e3,
            Megahertz => 2.0 * PI * 1e6,
            Gigahertz => 2.0 * PI * 1e9,
            Erg => 1.0,
            Joule => 1.0e7,
            Gauss => 1.0,
            Tesla => 1.0e4,
            PerCm => 1.0,
            CmPerSecond => 1.0,
            MeterPerSecond => 1.0e2,
            Unitless | Radian => 1.0,
            Degree => PI / 180.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Debye => "D",
            EsuCm => "esu·cm",
            CoulombMeter => "C·m",
            StatvoltPerCm => "statV/cm",
            VoltPerCm => "V/cm",
            KilovoltPerCm => "kV/cm",
            VoltPerMeter => "V/m",
            ErgPerSecondCm2 => "erg/(s·cm²)",
            WattPerCm2 => "W/cm²",
            MilliwattPerCm2 => "mW/cm²",
            MicrowattPerCm2 => "µW/cm²",
            Cm => "cm",
            Meter => "m",
            Millimeter => "mm",
            Micrometer => "µm",
            Nanometer => "nm",
            Second => "s",
            Millisecond => "ms",
            Microsecond => "µs",
            Nanosecond => "ns",
            RadPerSecond => "s⁻¹",
            Hertz => "Hz",
            Kilohertz => "kHz",
            Megahertz => "MHz",
            Gigahertz => "GHz",
            Erg => "erg",
            Joule => "J",
            Gauss => "G",
            Tesla => "T",
            PerCm => "cm⁻¹",
            CmPerSecond => "cm/s",
            MeterPerSecond => "m/s",
            Unitless => "",
            Radian => "rad",
            Degree => "°",
        }
    }

    /// The base CGS unit for a dimension.
    pub fn base(dim: Dimension) -> Unit {
        match dim {
            Dimension::DipoleMoment => Unit::EsuCm,
            Dimension::ElectricField => Unit::StatvoltPerCm,
            Dimension::Intensity => Unit::ErgPerSecondCm2,
            Dimension::Length => Unit::Cm,
            Dimension::Time => Unit::Second,
            Dimension::AngularFrequency => Unit::RadPerSecond,
            Dimension::Energy => Unit::Erg,
            Dimension::MagneticField => Unit::Gauss,
            Dimension::Wavenumber => Unit::PerCm,
            Dimension::Velocity => Unit::CmPerSecond,
            Dimension::Dimensionless => Unit::Unitless,
        }
    }
}

/// Spectroscopic equivalence: energy, angular frequency and wavenumber are
/// interconvertible through E = ħω and ω = 2πc·ν̃. Returns the factor taking a
/// base value of `from` to a base value of `to`.
fn spectroscopic_factor(from: Dimension, to: Dimension) -> Option<f64> {
    use Dimension::*;
    // express everything via rad/s
    let to_omega = |d: Dimension| match d {
        AngularFrequency => Some(1.0),
        Energy => Some(1.0 / consts::HBAR),
        Wavenumber => Some(2.0 * PI * consts::C),
        _ => None,
    };
    Some(to_omega(from)? / to_omega(to)?)
}

/// A value tagged with its unit. Values are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    value: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite(value));
        }
        Ok(Self { value, unit })
    }

    /// Build from a value already expressed in the base CGS unit of `dim`.
    pub fn from_base(value: f64, dim: Dimension) -> Result<Self> {
        Self::new(value, Unit::base(dim))
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Value in the base CGS unit of its own dimension.
    pub fn base_value(&self) -> f64 {
        self.value * self.unit.to_base()
    }

    /// Value in base CGS units, after checking the dimension.
    pub fn cgs(&self, expected: Dimension) -> Result<f64> {
        if self.dimension() != expected {
            return Err(Error::DimensionMismatch { expected, found: self.dimension() });
        }
        Ok(self.base_value())
    }

    /// Shorthand for `convert(...)?.value()`.
    pub fn in_unit(&self, target: Unit) -> Result<f64> {
        Ok(convert(*self, target)?.value)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.unit.symbol();
        if sym.is_empty() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, sym)
        }
    }
}

/// Convert `q` into `target`. Same-dimension conversions are exact scalings;
/// energy, angular frequency and wavenumber convert into each other through ħ
/// and 2πc.
pub fn convert(q: Quantity, target: Unit) -> Result<Quantity> {
    let (from, to) = (q.dimension(), target.dimension());
    let base = if from == to {
        q.base_value()
    } else {
        let k = spectroscopic_factor(from, to).ok_or(Error::DimensionMismatch { expected: to, found: from })?;
        q.base_value() * k
    };
    Quantity::new(base / target.to_base(), target)
}

/// Rabi frequency Ω = µE/ħ.
pub fn rabi_from_field(mu: Quantity, field: Quantity) -> Result<Quantity> {
    let mu = mu.cgs(Dimension::DipoleMoment)?;
    let e = field.cgs(Dimension::ElectricField)?;
    if mu <= 0.0 {
        return Err(invalid("mu", "transition dipole moment must be positive"));
    }
    if e < 0.0 {
        return Err(invalid("field", "field amplitude must be non-negative"));
    }
    Quantity::new(mu * e / consts::HBAR, Unit::RadPerSecond)
}

/// Field amplitude E = ħΩ/µ needed for a given Rabi frequency.
pub fn field_from_rabi(mu: Quantity, rabi: Quantity) -> Result<Quantity> {
    let mu = mu.cgs(Dimension::DipoleMoment)?;
    let omega = rabi.cgs(Dimension::AngularFrequency)?;
    if mu <= 0.0 {
        return Err(invalid("mu", "transition dipole moment must be positive"));
    }
    if omega < 0.0 {
        return Err(invalid("rabi", "Rabi frequency must be non-negative"));
    }
    Quantity::new(omega * consts::HBAR / mu, Unit::StatvoltPerCm)
}

/// Cycle-averaged intensity I = cE²/4π, reported in W/cm².
pub fn field_to_intensity(field: Quantity) -> Result<Quantity> {
    let e = field.cgs(Dimension::ElectricField)?;
    if e < 0.0 {
        return Err(invalid("field", "field amplitude must be non-negative"));
    }
    let cgs = consts::C * e * e / (4.0 * PI);
    Quantity::new(cgs / consts::ERG_S_CM2_PER_W_CM2, Unit::WattPerCm2)
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Unit::*;
        let u = match s.trim() {
            "D" | "debye" => Debye,
            "esu*cm" | "esu·cm" | "esucm" => EsuCm,
            "Cm" | "C*m" | "C·m" => CoulombMeter,
            "statV/cm" => StatvoltPerCm,
            "V/cm" => VoltPerCm,
            "kV/cm" => KilovoltPerCm,
            "V/m" => VoltPerMeter,
            "erg/s/cm2" => ErgPerSecondCm2,
            "W/cm2" | "W/cm²" => WattPerCm2,
            "mW/cm2" | "mW/cm²" => MilliwattPerCm2,
            "uW/cm2" | "µW/cm2" | "µW/cm²" => MicrowattPerCm2,
            "cm" => Cm,
            "m" => Meter,
            "mm" => Millimeter,
            "um" | "µm" => Micrometer,
            "nm" => Nanometer,
            "s" => Second,
            "ms" => Millisecond,
            "us" | "µs" => Microsecond,
            "ns" => Nanosecond,
            "rad/s" | "/s" | "s-1" => RadPerSecond,
            "Hz" => Hertz,
            "kHz" => Kilohertz,
            "MHz" => Megahertz,
            "GHz" => Gigahertz,
            "erg" => Erg,
            "J" => Joule,
            "G" => Gauss,
            "T" => Tesla,
            "/cm" | "cm-1" | "cm^-1" => PerCm,
            "cm/s" => CmPerSecond,
            "m/s" => MeterPerSecond,
            "rad" => Radian,
            "deg" | "°" => Degree,
            other => return Err(invalid("unit", format!("unrecognised unit `{other}`"))),
        };
        Ok(u)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    /// Parses `"<number><unit>"` or `"<number> <unit>"`, e.g. `"500nm"`,
    /// `"1.37 D"`, `"4kV/cm"`. A bare number is rejected; use
    /// [`parse_with_default`] where a raw number has an unambiguous meaning.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = numeric_prefix_len(s);
        if split == 0 {
            return Err(invalid("quantity", format!("`{s}` does not start with a number")));
        }
        let (num, unit) = s.split_at(split);
        let value: f64 = num.parse().map_err(|_| invalid("quantity", format!("cannot parse number in `{s}`")))?;
        if unit.trim().is_empty() {
            return Err(invalid("quantity", format!("`{s}` needs a unit suffix")));
        }
        Quantity::new(value, unit.parse()?)
    }
}

/// Parse a quantity; a bare number is interpreted in `default` unit. Only
/// meant for angular frequencies, where a raw `1e5` means rad/s.
pub fn parse_with_default(s: &str, default: Unit) -> Result<Quantity> {
    let s = s.trim();
    if numeric_prefix_len(s) == s.len() && !s.is_empty() {
        let v: f64 = s.parse().map_err(|_| invalid("quantity", format!("cannot parse number in `{s}`")))?;
        return Quantity::new(v, default);
    }
    s.parse()
}

fn numeric_prefix_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    let mut seen_digit = false;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        seen_digit |= b[i].is_ascii_digit();
        i += 1;
    }
    // exponent, only if followed by digits
    if seen_digit && i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > start {
            i = j;
        }
    }
    if seen_digit {
        i
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn debye_is_1e_minus_18_esu_cm() {
        let q = convert(Quantity::new(1.0, Unit::Debye).unwrap(), Unit::EsuCm).unwrap();
        assert_eq!(q.value(), 1e-18);
    }

    #[test]
    fn wavenumber_to_angular_frequency() {
        let q = Quantity::new(0.1935, Unit::PerCm).unwrap();
        let w = convert(q, Unit::RadPerSecond).unwrap();
        // 2π · 2.99792458e10 · 0.1935
        assert_relative_eq!(w.value(), 3.645e10, max_relative = 1e-3);
        assert_relative_eq!(w.value(), 2.0 * PI * 2.997_924_58e10 * 0.1935, max_relative = 1e-14);
    }

    #[test]
    fn statvolt_per_cm() {
        let q = Quantity::new(1.0, Unit::StatvoltPerCm).unwrap();
        assert_relative_eq!(q.in_unit(Unit::VoltPerCm).unwrap(), 299.792458, max_relative = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let q = Quantity::new(1.0, Unit::Nanometer).unwrap();
        assert!(matches!(convert(q, Unit::Second), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            rabi_from_field(q, Quantity::new(1.0, Unit::VoltPerCm).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Quantity::new(f64::NAN, Unit::Cm).is_err());
        assert!(Quantity::new(f64::INFINITY, Unit::Cm).is_err());
    }

    #[test]
    fn co_pi_pulse_field_and_intensity() {
        let mu = Quantity::new(2e-4, Unit::Debye).unwrap();
        let omega = Quantity::new(6e4, Unit::RadPerSecond).unwrap();
        let e = field_from_rabi(mu, omega).unwrap();
        let e_vcm = e.in_unit(Unit::VoltPerCm).unwrap();
        assert!((e_vcm - 95.0).abs() < 1.0, "{e_vcm}");
        let i = field_to_intensity(e).unwrap();
        assert!((i.value() - 24.0).abs() < 0.5, "{}", i.value());
        // inverse closes
        let back = rabi_from_field(mu, e).unwrap();
        assert_relative_eq!(back.value(), 6e4, max_relative = 1e-12);
    }

    #[test]
    fn lics_stark_rate() {
        let mu = Quantity::new(5.5, Unit::Debye).unwrap();
        let e = Quantity::new(4.19, Unit::KilovoltPerCm).unwrap();
        let w = rabi_from_field(mu, e).unwrap().value();
        assert!((w / 7.3e10 - 1.0).abs() < 0.01, "{w}");
    }

    #[test]
    fn zero_field_gives_zero() {
        let mu = Quantity::new(1.0, Unit::Debye).unwrap();
        let zero = Quantity::new(0.0, Unit::VoltPerCm).unwrap();
        assert_eq!(rabi_from_field(mu, zero).unwrap().value(), 0.0);
        assert_eq!(field_to_intensity(zero).unwrap().value(), 0.0);
    }

    #[test]
    fn non_positive_dipole_is_an_error() {
        let mu = Quantity::new(0.0, Unit::Debye).unwrap();
        let e = Quantity::new(1.0, Unit::VoltPerCm).unwrap();
        assert!(rabi_from_field(mu, e).is_err());
    }

    #[test]
    fn parse_suffixes() {
        let q: Quantity = "500nm".parse().unwrap();
        assert_eq!((q.value(), q.unit()), (500.0, Unit::Nanometer));
        let q: Quantity = "1.37 D".parse().unwrap();
        assert_eq!(q.unit(), Unit::Debye);
        let q: Quantity = "4.2kV/cm".parse().unwrap();
        assert_eq!(q.unit(), Unit::KilovoltPerCm);
        let q: Quantity = "1e5/s".parse().unwrap();
        assert_eq!((q.value(), q.unit()), (1e5, Unit::RadPerSecond));
        assert!("500".parse::<Quantity>().is_err());
        assert!("nm".parse::<Quantity>().is_err());
        assert_eq!(parse_with_default("1e5", Unit::RadPerSecond).unwrap().value(), 1e5);
    }

    fn same_dimension_units() -> impl Strategy<Value = (Unit, Unit)> {
        use Unit::*;
        let groups: Vec<Vec<Unit>> = vec![
            vec![Debye, EsuCm, CoulombMeter],
            vec![StatvoltPerCm, VoltPerCm, KilovoltPerCm, VoltPerMeter],
            vec![ErgPerSecondCm2, WattPerCm2, MilliwattPerCm2, MicrowattPerCm2],
            vec![Cm, Meter, Millimeter, Micrometer, Nanometer],
            vec![Second, Millisecond, Microsecond, Nanosecond],
            vec![RadPerSecond, Hertz, Kilohertz, Megahertz, Gigahertz, Erg, Joule, PerCm],
            vec![Gauss, Tesla],
        ];
        prop::sample::select(groups).prop_flat_map(|g| (prop::sample::select(g.clone()), prop::sample::select(g)))
    }

    proptest! {
        #[test]
        fn round_trip_is_identity((a, b) in same_dimension_units(), v in -1e6f64..1e6) {
            let q = Quantity::new(v, a).unwrap();
            let back = convert(convert(q, b).unwrap(), a).unwrap();
            prop_assert!((back.value() - v).abs() <= 1e-12 * v.abs().max(1e-300));
        }

        #[test]
        fn intensity_is_quadratic(e in 0.0f64..1e4) {
            let i1 = field_to_intensity(Quantity::new(e, Unit::VoltPerCm).unwrap()).unwrap().value();
            let i2 = field_to_intensity(Quantity::new(2.0 * e, Unit::VoltPerCm).unwrap()).unwrap().value();
            prop_assert!((i2 - 4.0 * i1).abs() <= 1e-12 * i2.max(1e-300));
        }

        #[test]
        fn rabi_is_bilinear(mu in 1e-4f64..10.0, e in 0.0f64..1e4) {
            let q = |m: f64, f: f64| rabi_from_field(
                Quantity::new(m, Unit::Debye).unwrap(),
                Quantity::new(f, Unit::VoltPerCm).unwrap(),
            ).unwrap().value();
            let base = q(mu, e);
            prop_assert!((q(2.0 * mu, e) - 2.0 * base).abs() <= 1e-12 * base.max(1e-300));
            prop_assert!((q(mu, 2.0 * e) - 2.0 * base).abs() <= 1e-12 * base.max(1e-300));
        }
    }
}
