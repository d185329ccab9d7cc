//! CSV writer/parser for study results.
//!
//! Schema (documented per study in docs/formats.md): one header row of
//! column names, then one row per sample; floats serialized as the shortest
//! decimal that round-trips; UTF-8 with LF line endings. `parse` inverts
//! `render` exactly.

use std::fs;
use std::io;
use std::path::Path;
use zeno_core::experiments::StudyResult;

/// Render a study as CSV text.
pub fn render(result: &StudyResult) -> String {
    let mut out = String::new();
    out.push_str(&result.columns.join(","));
    out.push('\n');
    for row in &result.rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Write a study as CSV to `path`.
pub fn write(result: &StudyResult, path: &Path) -> io::Result<()> {
    fs::write(path, render(result))
}

/// Parse CSV text back into (columns, rows).
pub fn parse(text: &str) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty CSV"))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| {
            io::Error::new(
                io::ErrorKind::InvalidData,
                format!("row {}: {e}", lineno + 2),
            )
        })?;
        if row.len() != columns.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    row.len(),
                    columns.len()
                ),
            ));
        }
        rows.push(row);
    }
    Ok((columns, rows))
}
