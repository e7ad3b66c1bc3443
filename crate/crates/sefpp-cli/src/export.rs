//! Trace serialization: CSV and JSON-lines writers plus the matching
//! readers.
//!
//! Both formats print floats with 17 significant digits, enough to pin a
//! double exactly, so a written trace parses back to bit-identical values;
//! the readers exist so tests and downstream tooling can rely on that. The
//! CSV column order is fixed:
//!
//! ```text
//! n, x1..xD, y1..yE, coupling, fix_x, fix_y, gamma, k_norm, r_norm
//! ```
//!
//! with empty cells where a run did not log the optional quantities. The
//! JSON-lines form carries one record object per line with the same fields.
//!
//! Bit-exact parsing needs serde_json's `float_roundtrip` feature: its
//! default float path may land one ulp off (seen in practice on values near
//! 2^-53), which is exactly the error this module promises not to make.

use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result, anyhow, bail};
use serde::{Deserialize, Serialize};

use sefpp::{IterationTrace, TraceRecord};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_VAR: &str = "SEFPP_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    JsonLines,
}

/// One exported record. `k_norm` and `r_norm` are the update-direction
/// norms logged by norm-free runs; `gamma` is the distance to a declared
/// known solution. All three stay empty when the run did not log them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub coupling: f64,
    pub fix_x: f64,
    pub fix_y: f64,
    pub gamma: Option<f64>,
    pub k_norm: Option<f64>,
    pub r_norm: Option<f64>,
}

impl TraceRow {
    pub fn from_record(record: &TraceRecord) -> Self {
        Self {
            n: record.n,
            x: record.x.coords().to_vec(),
            y: record.y.coords().to_vec(),
            coupling: record.coupling_residual,
            fix_x: record.fix_residual_x,
            fix_y: record.fix_residual_y,
            gamma: record.gamma,
            k_norm: record.direction_norm_x,
            r_norm: record.direction_norm_y,
        }
    }
}

/// Thins a trace to every k-th record, counted from the first, and always
/// keeps the final record so the stopping state survives any thinning.
pub fn select_rows(trace: &IterationTrace, every_k: usize) -> Vec<TraceRow> {
    let last = trace.records.len() - 1;
    trace
        .records
        .iter()
        .enumerate()
        .filter(|(i, _)| i % every_k == 0 || *i == last)
        .map(|(_, record)| TraceRow::from_record(record))
        .collect()
}

/// Applies the output-directory override: when `SEFPP_OUT_DIR` is set,
/// relative paths land under it. Absolute paths are always taken as given.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_relative()
        && let Some(dir) = env::var_os(OUT_DIR_VAR)
    {
        return PathBuf::from(dir).join(path);
    }
    path.to_path_buf()
}

pub fn write_rows(path: &Path, format: ExportFormat, rows: &[TraceRow]) -> Result<()> {
    if let Some(parent) = path.parent()
        && !parent.as_os_str().is_empty()
    {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, render(rows, format)).with_context(|| format!("writing {}", path.display()))
}

pub fn render(rows: &[TraceRow], format: ExportFormat) -> String {
    match format {
        ExportFormat::Csv => render_csv(rows),
        ExportFormat::JsonLines => render_json_lines(rows),
    }
}

pub fn parse(text: &str, format: ExportFormat) -> Result<Vec<TraceRow>> {
    match format {
        ExportFormat::Csv => parse_csv(text),
        ExportFormat::JsonLines => parse_json_lines(text),
    }
}

/// 17 significant digits: the shortest count that round-trips every f64.
fn cell(value: f64) -> String {
    format!("{value:.16e}")
}

fn optional_cell(value: Option<f64>) -> String {
    value.map(cell).unwrap_or_default()
}

fn render_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("n");
    if let Some(first) = rows.first() {
        for i in 1..=first.x.len() {
            write!(out, ",x{i}").unwrap();
        }
        for i in 1..=first.y.len() {
            write!(out, ",y{i}").unwrap();
        }
    }
    out.push_str(",coupling,fix_x,fix_y,gamma,k_norm,r_norm\n");
    for row in rows {
        write!(out, "{}", row.n).unwrap();
        for &c in row.x.iter().chain(row.y.iter()) {
            write!(out, ",{}", cell(c)).unwrap();
        }
        writeln!(
            out,
            ",{},{},{},{},{},{}",
            cell(row.coupling),
            cell(row.fix_x),
            cell(row.fix_y),
            optional_cell(row.gamma),
            optional_cell(row.k_norm),
            optional_cell(row.r_norm),
        )
        .unwrap();
    }
    out
}

fn render_json_lines(rows: &[TraceRow]) -> String {
    let mut out = String::new();
    for row in rows {
        // Infallible: TraceRow has no map keys or non-finite-only types.
        writeln!(out, "{}", serde_json::to_string(row).unwrap()).unwrap();
    }
    out
}

fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty trace file"))?;
    let names: Vec<&str> = header.split(',').collect();
    if names.first() != Some(&"n") {
        bail!("unrecognized header: {header}");
    }
    let x_dim = names.iter().filter(|c| c.starts_with('x')).count();
    let y_dim = names.iter().filter(|c| c.starts_with('y')).count();
    let expected = 1 + x_dim + y_dim + 6;
    if names.len() != expected || names[expected - 6..] != EXPECTED_TAIL {
        bail!("unrecognized header: {header}");
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            bail!(
                "line {}: expected {expected} fields, got {}",
                lineno + 2,
                fields.len()
            );
        }
        let float = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .with_context(|| format!("line {}, column {}", lineno + 2, names[i]))
        };
        let optional = |i: usize| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                float(i).map(Some)
            }
        };
        let mut x = Vec::with_capacity(x_dim);
        for i in 0..x_dim {
            x.push(float(1 + i)?);
        }
        let mut y = Vec::with_capacity(y_dim);
        for i in 0..y_dim {
            y.push(float(1 + x_dim + i)?);
        }
        let base = 1 + x_dim + y_dim;
        rows.push(TraceRow {
            n: fields[0]
                .parse()
                .with_context(|| format!("line {}, column n", lineno + 2))?,
            x,
            y,
            coupling: float(base)?,
            fix_x: float(base + 1)?,
            fix_y: float(base + 2)?,
            gamma: optional(base + 3)?,
            k_norm: optional(base + 4)?,
            r_norm: optional(base + 5)?,
        });
    }
    Ok(rows)
}

const EXPECTED_TAIL: [&str; 6] = ["coupling", "fix_x", "fix_y", "gamma", "k_norm", "r_norm"];

fn parse_json_lines(text: &str) -> Result<Vec<TraceRow>> {
    text.lines()
        .enumerate()
        .map(|(lineno, line)| {
            serde_json::from_str(line).with_context(|| format!("line {}", lineno + 1))
        })
        .collect()
}
