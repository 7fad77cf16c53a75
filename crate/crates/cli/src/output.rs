//! Deterministic file emission: CSV sweeps and JSON summaries.
//!
//! Floats are printed with Rust's shortest-round-trip formatting, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use cqka_core::analysis::MetricsReport;

/// Rows of a sweep CSV: fixed schema
/// `parameter,estimate,std_error,closed_form,closed_form_derived,flag`.
pub struct SweepCsv {
    rows: Vec<(f64, MetricsReport)>,
}

impl SweepCsv {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn push(&mut self, parameter: f64, report: MetricsReport) {
        self.rows.push((parameter, report));
    }

    pub fn render(&self) -> String {
        let mut out = String::from("parameter,estimate,std_error,closed_form,closed_form_derived,flag\n");
        for (parameter, r) in &self.rows {
            let derived = r
                .closed_form_derived
                .map(|v| format!("{v}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{parameter},{},{},{},{derived},{}",
                r.estimate,
                r.std_error,
                r.closed_form,
                if r.discrepancy { 1 } else { 0 },
            );
        }
        out
    }
}

/// Simple fixed-schema CSV with explicit header and float rows.
pub struct TableCsv {
    header: &'static str,
    rows: Vec<Vec<f64>>,
}

impl TableCsv {
    pub fn new(header: &'static str) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::from(self.header);
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Write a file, creating the output directory on demand.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_schema_is_stable() {
        let mut csv = SweepCsv::new();
        csv.push(0.5, MetricsReport::new(0.25, 0.01, 100, 0.25, Some(0.26)));
        csv.push(1.0, MetricsReport::new(0.5, 0.01, 100, 0.9, None));
        let text = csv.render();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "parameter,estimate,std_error,closed_form,closed_form_derived,flag"
        );
        assert_eq!(lines.next().unwrap(), "0.5,0.25,0.01,0.25,0.26,0");
        assert_eq!(lines.next().unwrap(), "1,0.5,0.01,0.9,,1");
    }
}
