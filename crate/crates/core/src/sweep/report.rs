use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{RowTerm, StopReason, Verdict};

use super::config::SweepConfig;

pub const CSV_HEADER: &str = "eccentricity,gamma,max_norm,argmax_q,stop_reason,verdict";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eccentricity: f64,
    pub gamma: f64,
    pub max_norm: f64,
    pub argmax_q: u32,
    pub stop_reason: StopReason,
    pub verdict: Verdict,
    /// Seconds spent on the scan itself (excludes `κ` and cache work).
    pub wall_time: f64,
    pub kappa_unconverged: usize,
    pub terms: Vec<RowTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

/// Formats `v` with six significant digits in fixed notation.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.5}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_sig6(r.eccentricity),
                fmt_sig6(r.gamma),
                fmt_sig6(r.max_norm),
                r.argmax_q,
                r.stop_reason.as_str(),
                r.verdict.as_str()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep results always serialize")
    }
}

/// A point of a result file as far as plotting is concerned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultPoint {
    pub eccentricity: f64,
    pub gamma: f64,
    pub max_norm: f64,
}

/// Reads the points of a CSV or JSON result file (chosen by extension).
pub fn read_result_points(path: &Path) -> Result<Vec<ResultPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path
        .extension()
        .is_some_and(|x| x.eq_ignore_ascii_case("json"));
    if is_json {
        let parsed: SweepResult = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        return Ok(parsed
            .rows
            .iter()
            .map(|r| ResultPoint {
                eccentricity: r.eccentricity,
                gamma: r.gamma,
                max_norm: r.max_norm,
            })
            .collect());
    }
    parse_csv_points(&text, path)
}

fn parse_csv_points(text: &str, path: &Path) -> Result<Vec<ResultPoint>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((_, h)) => return Err(err(1, format!("unexpected header {h:?}"))),
        None => return Err(err(1, "empty file".into())),
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(err(lineno, format!("expected 6 columns, found {}", cols.len())));
        }
        let num = |k: usize, name: &str| -> Result<f64> {
            cols[k]
                .parse::<f64>()
                .map_err(|_| err(lineno, format!("bad {name} {:?}", cols[k])))
        };
        points.push(ResultPoint {
            eccentricity: num(0, "eccentricity")?,
            gamma: num(1, "gamma")?,
            max_norm: num(2, "max_norm")?,
        });
        cols[3]
            .parse::<u32>()
            .map_err(|_| err(lineno, format!("bad argmax_q {:?}", cols[3])))?;
        StopReason::parse(cols[4])
            .ok_or_else(|| err(lineno, format!("bad stop_reason {:?}", cols[4])))?;
        Verdict::parse(cols[5]).ok_or_else(|| err(lineno, format!("bad verdict {:?}", cols[5])))?;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(0.722032), "0.722032");
        assert_eq!(fmt_sig6(7.57321234), "7.57321");
        assert_eq!(fmt_sig6(0.3), "0.300000");
        assert_eq!(fmt_sig6(3.01), "3.01000");
        assert_eq!(fmt_sig6(0.0), "0.00000");
        assert_eq!(fmt_sig6(0.0123456789), "0.0123457");
        assert_eq!(fmt_sig6(123456.7), "123457");
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let p = PathBuf::from("r.csv");
        let good = format!("{CSV_HEADER}\n0.300000,3.50000,1.07770,3,below-half,inconclusive\n");
        assert_eq!(parse_csv_points(&good, &p).unwrap().len(), 1);
        let bad = format!("{good}0.4,3.5,oops,3,below-half,inconclusive\n");
        match parse_csv_points(&bad, &p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_csv_points("a,b\n", &p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        let short = format!("{CSV_HEADER}\n0.1,3.5\n");
        assert!(parse_csv_points(&short, &p).is_err());
    }
}
