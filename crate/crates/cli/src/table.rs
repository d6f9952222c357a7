//! Deterministic tabular output: CSV with `#` metadata lines, or JSON with a
//! `{meta, columns, rows}` envelope.
//!
//! Formatting is fixed (9 significant digits in CSV, 17 in JSON) and the row
//! order is whatever the producer supplied, so identical configurations give
//! byte-identical output on one platform.

use std::fmt::Write as _;

use anyhow::{bail, Result};

/// Schema version stamped into every JSON envelope.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => bail!("unknown format {other:?} (expected csv or json)"),
        }
    }
}

/// A finished table: ordered metadata, column headers carrying units, and
/// rows of finite numbers.
#[derive(Debug, Clone)]
pub struct OutputTable {
    /// Ordered key/value pairs; emitted verbatim.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            bail!("row has {} entries, table has {} columns", row.len(), self.columns.len());
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            bail!("non-finite value {bad} rejected from output row");
        }
        self.rows.push(row);
        Ok(())
    }

    /// Render in the requested format. CSV floats carry 9 significant
    /// digits, JSON floats 17 (round-trip exact for f64).
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.8e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        // Assembled by hand so the float formatting and key order stay fixed.
        let mut out = String::new();
        out.push_str("{\n  \"schema_version\": ");
        let _ = write!(out, "{SCHEMA_VERSION}");
        out.push_str(",\n  \"meta\": {");
        for (i, (k, v)) in self.meta.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "\n    {}: {}", json_string(k), json_string(v));
        }
        out.push_str("\n  },\n  \"columns\": [");
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&json_string(c));
        }
        out.push_str("],\n  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n    [");
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push(']');
        }
        out.push_str("\n  ]\n}\n");
        out
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_rows() {
        let mut t = OutputTable::new(&["a", "b"]);
        assert!(t.push_row(vec![1.0, f64::NAN]).is_err());
        assert!(t.push_row(vec![1.0, f64::INFINITY]).is_err());
        assert!(t.push_row(vec![1.0, 2.0]).is_ok());
        assert!(t.push_row(vec![1.0]).is_err());
    }

    #[test]
    fn csv_and_json_are_deterministic() {
        let build = || {
            let mut t = OutputTable::new(&["x [m]", "y [Pa]"]);
            t.meta("tool", "demo");
            t.push_row(vec![0.1, -2.5e-3]).unwrap();
            t.push_row(vec![0.2, -1.25e-3]).unwrap();
            t
        };
        assert_eq!(build().render(Format::Csv), build().render(Format::Csv));
        assert_eq!(build().render(Format::Json), build().render(Format::Json));
        let csv = build().render(Format::Csv);
        assert!(csv.starts_with("# tool = demo\n"));
        assert!(csv.contains("x [m],y [Pa]"));
        assert!(csv.contains("1.00000000e-1"));
    }

    #[test]
    fn json_round_trips_through_serde() {
        let mut t = OutputTable::new(&["v"]);
        t.meta("k", "v");
        t.push_row(vec![1.0 / 3.0]).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(parsed["schema_version"], 1);
        assert_eq!(parsed["rows"][0][0].as_f64().unwrap(), 1.0 / 3.0);
    }
}
