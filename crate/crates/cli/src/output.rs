//! Table rendering and run manifests.
//!
//! Every command renders one table: aligned columns on standard output, CSV
//! when written to a file. Numeric cells use the shortest round-trip decimal
//! form with a `.` separator regardless of locale; identical inputs render
//! byte-identical tables.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

/// A rectangular result table.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render_aligned(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let fmt_line = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        out.push_str(&fmt_line(&self.header, &widths));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&fmt_line(row, &widths));
            out.push('\n');
        }
        out
    }
}

/// Formats a float for table cells: finite shortest round-trip decimal; a
/// non-finite value is an error marker, never a bare NaN in the output.
pub fn num(value: f64) -> String {
    if value.is_finite() {
        format!("{value}")
    } else {
        format!("error:non-finite({value})")
    }
}

/// Reproducibility sidecar written next to every output file.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub input: Vec<String>,
    pub seed: Option<u64>,
    pub out: String,
    pub tool_version: &'static str,
    pub wall_time_ms: u128,
}

pub struct RunTimer {
    start: Instant,
}

impl RunTimer {
    pub fn start() -> Self {
        Self {
            start: Instant::now(),
        }
    }

    /// Prints the table to stdout and, when requested, writes the CSV plus
    /// its manifest sidecar `<out>.manifest.json`.
    pub fn emit(
        &self,
        table: &Table,
        command: &'static str,
        inputs: &[&Path],
        seed: Option<u64>,
        out: Option<&Path>,
    ) -> Result<()> {
        print!("{}", table.render_aligned());
        if let Some(path) = out {
            fs::write(path, table.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest {
                command,
                input: inputs.iter().map(|p| p.display().to_string()).collect(),
                seed,
                out: path.display().to_string(),
                tool_version: env!("CARGO_PKG_VERSION"),
                wall_time_ms: self.start.elapsed().as_millis(),
            };
            let manifest_path = path.with_extension(match path.extension() {
                Some(ext) => format!("{}.manifest.json", ext.to_string_lossy()),
                None => "manifest.json".to_string(),
            });
            fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
                .with_context(|| format!("writing {}", manifest_path.display()))?;
        }
        Ok(())
    }
}
