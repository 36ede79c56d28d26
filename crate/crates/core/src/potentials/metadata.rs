//! `key = value` text records describing an assembled potential.

use std::fmt::Write as _;

use super::{DimerCurve, TrimerSurface};
use crate::{Error, Result};

pub fn format_metadata(entries: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub fn parse_metadata(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: "expected key = value".into(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn dimer_entries(curve: &DimerCurve) -> Vec<(String, String)> {
    let (c6, c8, c10) = curve.tail_coefficients();
    let cal = curve.calibration();
    vec![
        ("c6_au".into(), format!("{c6:.10e}")),
        ("c8_au".into(), format!("{c8:.10e}")),
        ("c10_au".into(), format!("{c10:.10e}")),
        (
            "switch_radius_bohr".into(),
            format!("{:.10}", curve.switch_radius()),
        ),
        (
            "calibration_shift_angstrom".into(),
            format!("{:.8}", cal.shift),
        ),
        ("calibration_scale".into(), format!("{:.8}", cal.scale)),
        (
            "samples".into(),
            curve.inner_model().abscissae().len().to_string(),
        ),
    ]
}

pub fn trimer_entries(surface: &TrimerSurface) -> Vec<(String, String)> {
    let mut e = dimer_entries(&surface.pairwise);
    e.push(("c9_au".into(), format!("{:.10e}", surface.c9)));
    e.push(("c11_au".into(), format!("{:.10e}", surface.c11)));
    e.push((
        "long_range_subtracted".into(),
        surface.long_range.is_some().to_string(),
    ));
    e.push(("lambda".into(), format!("{}", surface.lambda)));
    e.push((
        "v3_samples".into(),
        surface.v3_model.geometries().len().to_string(),
    ));
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let e = vec![
            ("a".to_string(), "1.5".to_string()),
            ("b".into(), "x y".into()),
        ];
        assert_eq!(parse_metadata(&format_metadata(&e)).unwrap(), e);
        assert!(parse_metadata("novalue\n").is_err());
    }
}
