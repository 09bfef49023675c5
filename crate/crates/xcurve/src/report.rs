//! Run reports and tabular output.
//!
//! Every CLI command that produces files writes a `report.json` conforming
//! to the `xcurve-report/1` schema next to its data, plus CSV tables with
//! full-precision floats. Wall-clock time is recorded only on request so
//! that repeated runs with identical inputs produce byte-identical output.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Schema identifier stamped into every report.
pub const REPORT_SCHEMA: &str = "xcurve-report/1";

/// Summary statistics of a residual field over a grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Largest absolute value.
    pub sup: f64,
    /// Root-mean-square value.
    pub rms: f64,
    /// Number of grid points summarized.
    pub count: usize,
}

impl ResidualReport {
    /// Summarizes the values in `samples`.
    pub fn from_samples(samples: &[f64]) -> Self {
        let sup = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sq: f64 = samples.iter().map(|v| v * v).sum();
        let count = samples.len();
        let rms = if count == 0 {
            0.0
        } else {
            (sq / count as f64).sqrt()
        };
        Self { sup, rms, count }
    }
}

/// A topological-degree computation with its robustness margin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeRecord {
    /// What was measured (e.g. boundary map and domain).
    pub name: String,
    /// The integer degree or winding number.
    pub value: i32,
    /// Smallest magnitude of the map on the boundary encountered while
    /// certifying the count; the certificate is only as strong as this
    /// margin is clearly positive.
    pub min_abs: f64,
}

/// Top-level JSON report written by every data-producing command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    /// Always [`REPORT_SCHEMA`].
    pub schema: String,
    /// The invoked subcommand and its arguments, normalized.
    pub command: Vec<String>,
    /// RNG seed if the command used randomness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Named tolerances in effect.
    pub tolerances: BTreeMap<String, f64>,
    /// Named residual summaries.
    pub residuals: BTreeMap<String, ResidualReport>,
    /// Degree / winding certificates produced by the run.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub degrees: Vec<DegreeRecord>,
    /// Named scalar diagnostics (certificate values, defects, margins).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub scalars: BTreeMap<String, f64>,
    /// Non-fatal observations worth surfacing.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    /// Elapsed seconds; omitted unless timing was explicitly requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    /// Fresh report for `command`.
    pub fn new(command: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            command: command.into_iter().map(Into::into).collect(),
            seed: None,
            tolerances: BTreeMap::new(),
            residuals: BTreeMap::new(),
            degrees: Vec::new(),
            scalars: BTreeMap::new(),
            warnings: Vec::new(),
            wall_time_s: None,
        }
    }

    /// Serializes to pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    /// Writes the report to `path`.
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV table: `columns` are (header, data) pairs of equal length.
pub fn write_csv(path: &Path, columns: &[(&str, &[f64])]) -> std::io::Result<()> {
    assert!(!columns.is_empty(), "CSV needs at least one column");
    let rows = columns[0].1.len();
    assert!(
        columns.iter().all(|(_, data)| data.len() == rows),
        "CSV columns must have equal length"
    );
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    let headers: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    writeln!(out, "{}", headers.join(","))?;
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|(_, data)| fmt_float(data[i])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_through_json() {
        let mut rep = RunReport::new(["solve", "--symmetry", "so3"]);
        rep.tolerances.insert("tol".into(), 1e-10);
        rep.residuals
            .insert("closed_loop".into(), ResidualReport::from_samples(&[1e-9, -3e-9]));
        rep.degrees.push(DegreeRecord {
            name: "winding".into(),
            value: -1,
            min_abs: 0.4,
        });
        let json = rep.to_json();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schema, REPORT_SCHEMA);
        assert_eq!(back.command, rep.command);
        assert_eq!(back.degrees[0].value, -1);
        assert!(json.ends_with('\n'));
        assert!(!json.contains("wall_time_s"));
    }

    #[test]
    fn residual_summary_matches_hand_computation() {
        let r = ResidualReport::from_samples(&[3.0, -4.0]);
        assert_eq!(r.sup, 4.0);
        assert!((r.rms - (12.5f64).sqrt()).abs() < 1e-15);
        assert_eq!(r.count, 2);
    }

    #[test]
    fn csv_output_is_full_precision_and_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let r = [0.0, 0.5];
        let v = [1.0 / 3.0, 2.0 / 3.0];
        write_csv(&path, &[("r", &r), ("v", &v)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,v"));
        let first = lines.next().unwrap();
        let third: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0, "formatted float must round-trip exactly");
        write_csv(&path, &[("r", &r), ("v", &v)]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    }
}
