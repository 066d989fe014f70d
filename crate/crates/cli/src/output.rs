use std::fmt::Write as _;

use serde::Serialize;

use crate::args::Format;
use crate::error::{CliError, CliResult};

/// A titled grid of pre-formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { title: None, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, out: &mut String) {
        if let Some(t) = &self.title {
            let _ = writeln!(out, "{t}");
        }
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                width[i] = width[i].max(c.chars().count());
            }
        }
        let line = |cells: &[String], out: &mut String| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                s.push_str(c);
                s.extend(std::iter::repeat_n(' ', width[i] - c.chars().count()));
            }
            let _ = writeln!(out, "{}", s.trim_end());
        };
        line(&self.header, out);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        line(&rule, out);
        for r in &self.rows {
            line(r, out);
        }
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8 cells"))
    }
}

/// Everything one command produces. `csv` holds the machine-readable rows;
/// `tables` are for people.
pub struct Report {
    pub command: &'static str,
    pub json: serde_json::Value,
    pub tables: Vec<Table>,
    pub csv: Option<String>,
    pub notes: Vec<String>,
    /// Set when the output is still worth writing but the run must exit non-zero.
    pub failure: Option<CliError>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: u32,
    result: &'a serde_json::Value,
}

impl Report {
    pub fn new(command: &'static str, result: impl Serialize) -> CliResult<Self> {
        Ok(Self {
            command,
            json: serde_json::to_value(result)?,
            tables: Vec::new(),
            csv: None,
            notes: Vec::new(),
            failure: None,
        })
    }

    pub fn table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let env = Envelope { command: self.command, version: 1, result: &self.json };
                let mut s = serde_json::to_string_pretty(&env)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => match &self.csv {
                Some(c) => Ok(c.clone()),
                None => self.tables.first().map(Table::to_csv).unwrap_or_else(|| Ok(String::new())),
            },
            Format::Table => {
                let mut out = String::new();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    t.render(&mut out);
                }
                if !self.notes.is_empty() {
                    out.push('\n');
                    for n in &self.notes {
                        let _ = writeln!(out, "{n}");
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Four significant digits, switching to exponent form outside [1e-3, 1e5).
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let digits = (3 - a.log10().floor() as i32).max(0) as usize;
        format!("{v:.digits$}")
    } else {
        format!("{v:.3e}")
    }
}

/// Shortest round-trip representation, for CSV cells.
pub fn raw(v: f64) -> String {
    format!("{v:?}")
}

pub fn flag(ok: bool) -> String {
    if ok { "yes" } else { "no" }.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(125.66370614), "125.7");
        assert_eq!(num(0.0123456), "0.01235");
        assert_eq!(num(1.7797e6), "1.780e6");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn table_alignment_and_csv() {
        let mut t = Table::new(&["a", "long name"]);
        t.push(vec!["1".into(), "x".into()]);
        t.push(vec!["22222".into(), "y, z".into()]);
        let mut s = String::new();
        t.render(&mut s);
        assert_eq!(s, "a      long name\n-----  ---------\n1      x\n22222  y, z\n");
        assert_eq!(t.to_csv().unwrap(), "a,long name\n1,x\n22222,\"y, z\"\n");
    }
}
