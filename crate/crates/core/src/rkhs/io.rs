//! Plain-text sample files: whitespace-separated columns, one sample per
//! line, `#` starts a comment line.
//!
//! 1D files hold `r_angstrom V_cm-1`; 3D files hold `r12 r23 r13 V3_cm-1`
//! with distances in Angstrom.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

fn parse_rows(text: &str, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != columns {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {columns} columns, found {}", fields.len()),
            });
        }
        let mut row = Vec::with_capacity(columns);
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("not a number: {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("non-finite value {f:?}"),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parse `(r, V)` pairs.
pub fn parse_samples_1d(text: &str) -> Result<Vec<(f64, f64)>> {
    Ok(parse_rows(text, 2)?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect())
}

/// Parse `(r12, r23, r13, V)` tuples.
pub fn parse_samples_3d(text: &str) -> Result<Vec<(f64, f64, f64, f64)>> {
    Ok(parse_rows(text, 4)?
        .into_iter()
        .map(|r| (r[0], r[1], r[2], r[3]))
        .collect())
}

pub fn read_samples_1d(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_samples_1d(&std::fs::read_to_string(path)?)
}

pub fn read_samples_3d(path: &Path) -> Result<Vec<(f64, f64, f64, f64)>> {
    parse_samples_3d(&std::fs::read_to_string(path)?)
}

/// Format 1D samples with an optional comment header.
pub fn format_samples_1d(samples: &[(f64, f64)], header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for &(r, v) in samples {
        let _ = writeln!(out, "{r:.10} {v:.12e}");
    }
    out
}

/// Format 3D samples with an optional comment header.
pub fn format_samples_3d(samples: &[(f64, f64, f64, f64)], header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for &(a, b, c, v) in samples {
        let _ = writeln!(out, "{a:.10} {b:.10} {c:.10} {v:.12e}");
    }
    out
}
