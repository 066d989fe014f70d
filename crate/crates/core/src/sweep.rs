//! One-dimensional parameter sweeps evaluated in parallel.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run_direct_gate, InteractionSpec, LevelScheme};
use crate::error::{invalid, Result};
use crate::feasibility::{feasibility_report, Scenario};
use crate::units::{Quantity, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(invalid("steps", "must be at least 1"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid("range", "must be finite"));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(invalid("range", "log sweeps need positive bounds"));
        }
        Ok(())
    }

    /// Grid points, endpoints included.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|k| {
                let x = k as f64 / n;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * x,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * x).exp(),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub outputs: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_none()).count()
    }

    fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.rows {
            for k in r.outputs.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols.sort();
        cols
    }

    /// CSV with a header row; failed points keep empty output cells. Numbers are
    /// written in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let cols = self.columns();
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["index".to_string(), self.axis.parameter.clone()];
        header.extend(cols.iter().cloned());
        header.push("error".into());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.index.to_string(), format!("{:?}", r.value)];
            rec.extend(cols.iter().map(|c| r.outputs.get(c).map(|v| format!("{v:?}")).unwrap_or_default()));
            rec.push(r.error.clone().unwrap_or_default());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Evaluate `f` at every grid point. Rows come back in grid order; a failing
/// point records its error instead of aborting the sweep.
pub fn run_sweep<F>(axis: &SweepAxis, f: F) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<BTreeMap<String, f64>> + Sync,
{
    let values = axis.values()?;
    let rows = values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| match f(value) {
            Ok(outputs) => SweepRow { index, value, outputs, error: None },
            Err(e) => SweepRow { index, value, outputs: BTreeMap::new(), error: Some(e.to_string()) },
        })
        .collect();
    Ok(SweepResult { axis: axis.clone(), rows })
}

/// Direct gate versus blockade shift `u` (rad/s) or Rabi frequency `omega`
/// (rad/s, both pulses), holding the other fixed.
pub fn gate_sweep(axis: &SweepAxis, scheme: &LevelScheme, fixed_u: f64, fixed_omega: f64) -> Result<SweepResult> {
    let param = axis.parameter.as_str();
    if !matches!(param, "u" | "omega") {
        return Err(invalid("parameter", format!("gate sweeps take `u` or `omega`, not `{param}`")));
    }
    run_sweep(axis, |x| {
        let (u, om) = if param == "u" { (x, fixed_omega) } else { (fixed_u, x) };
        let omega = Quantity::new(om, Unit::RadPerSecond)?;
        let g = run_direct_gate(scheme, &InteractionSpec::blockade(u), omega, omega)?;
        let mut o = BTreeMap::new();
        o.insert("u_over_omega".into(), u / om);
        o.insert("residual_phase_11".into(), g.residual_phases[3]);
        o.insert("fidelity".into(), g.fidelity);
        o.insert("leakage_11".into(), g.leakage[3]);
        o.insert("gate_time".into(), g.duration);
        Ok(o)
    })
}

/// Feasibility report rows versus one input, given in `unit`.
pub fn feasibility_sweep(
    axis: &SweepAxis,
    preset: &str,
    scenario: Scenario,
    unit: Unit,
    base: &BTreeMap<String, Quantity>,
) -> Result<SweepResult> {
    run_sweep(axis, |x| {
        let mut o = base.clone();
        o.insert(axis.parameter.clone(), Quantity::new(x, unit)?);
        let r = feasibility_report(preset, scenario, &o)?;
        Ok(r.rows.into_iter().map(|row| (row.name, row.value)).collect())
    })
}
