use std::io::Write;

use serde::Serialize;

use crate::config::{ResolvedConfig, Route};
use crate::error::CliError;
use crate::routes::Record;

pub const CSV_HEADER: [&str; 6] = ["route", "degree", "value", "stderr", "wall_ms", "seed"];

/// Threshold on |Δ|/σ above which a pair of rows is flagged as disagreeing.
pub const Z_THRESHOLD: f64 = 3.0;

fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::numerical("write-failed", e.to_string())
}

/// Zeroes `wall_ms` so repeated runs serialize identically.
pub fn strip_timing(records: &mut [Record]) {
    for r in records {
        r.wall_ms = 0.0;
    }
}

pub fn write_csv<W: Write>(out: W, records: &[Record]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_error)?;
    for r in records {
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            r.route.name().to_string(),
            r.degree.to_string(),
            format!("{:?}", r.value),
            opt(r.stderr.map(|s| format!("{s:?}"))),
            format!("{:.3}", r.wall_ms),
            opt(r.seed.map(|s| s.to_string())),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub degree: usize,
    pub a: Route,
    pub b: Route,
    pub delta: f64,
    /// `|Δ|/√(σ_a² + σ_b²)`; `None` when both rows are deterministic.
    pub z: Option<f64>,
    pub exact_match: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub comparisons: Vec<Comparison>,
    pub pass: bool,
}

/// Pairwise agreement of every two routes evaluated at the same degree.
/// Deterministic pairs are judged by `|Δ| ≤ tolerance` instead of a z-score.
pub fn compare_report(records: &[Record], tolerance: f64) -> CompareReport {
    let mut comparisons = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            if a.degree != b.degree || a.route == b.route {
                continue;
            }
            let delta = b.value - a.value;
            let var = a.stderr.unwrap_or(0.0).powi(2) + b.stderr.unwrap_or(0.0).powi(2);
            let (z, exact_match, pass) = if a.stderr.is_none() && b.stderr.is_none() {
                let exact = delta.abs() <= tolerance;
                (None, Some(exact), exact)
            } else {
                let z = if var > 0.0 {
                    delta.abs() / var.sqrt()
                } else if delta == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                (Some(z), None, z <= Z_THRESHOLD)
            };
            comparisons.push(Comparison {
                degree: a.degree,
                a: a.route,
                b: b.route,
                delta,
                z,
                exact_match,
                pass,
            });
        }
    }
    comparisons.sort_by_key(|c| (c.degree, c.a, c.b));
    let pass = comparisons.iter().all(|c| c.pass);
    CompareReport { comparisons, pass }
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    config: &'a ResolvedConfig,
    records: &'a [Record],
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<&'a CompareReport>,
}

pub fn write_json<W: Write>(
    mut out: W,
    config: &ResolvedConfig,
    records: &[Record],
    compare: Option<&CompareReport>,
) -> Result<(), CliError> {
    let doc = JsonDocument {
        config,
        records,
        compare,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io_error)?;
    writeln!(out).map_err(io_error)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn rec(route: Route, degree: usize, value: f64, stderr: Option<f64>) -> Record {
        Record {
            route,
            degree,
            value,
            stderr,
            wall_ms: 1.5,
            seed: stderr.map(|_| 7),
            extra: BTreeMap::new(),
        }
    }

    #[test]
    fn csv_has_fixed_header_and_empty_cells() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec(Route::Tensor, 1, 1.0, None)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "route,degree,value,stderr,wall_ms,seed\ntensor,1,1.0,,1.500,\n");
    }

    #[test]
    fn deterministic_pairs_use_exact_match() {
        let rows = [rec(Route::Tensor, 2, 0.375, None), rec(Route::LimitOde, 2, 0.375, None)];
        let report = compare_report(&rows, 1e-12);
        assert_eq!(report.comparisons.len(), 1);
        assert_eq!(report.comparisons[0].z, None);
        assert_eq!(report.comparisons[0].exact_match, Some(true));
        assert!(report.pass);
    }

    #[test]
    fn z_scores_flag_disagreement() {
        let rows = [
            rec(Route::Tensor, 2, 0.375, None),
            rec(Route::McProduct, 2, 0.376, Some(0.001)),
            rec(Route::McExponential, 2, 0.390, Some(0.001)),
        ];
        let report = compare_report(&rows, 1e-12);
        assert_eq!(report.comparisons.len(), 3);
        let z = |a, b| {
            report
                .comparisons
                .iter()
                .find(|c| c.a == a && c.b == b)
                .unwrap()
                .clone()
        };
        assert!(z(Route::Tensor, Route::McProduct).pass);
        assert!(!z(Route::Tensor, Route::McExponential).pass);
        assert!(!report.pass);
    }

    #[test]
    fn different_degrees_are_not_compared() {
        let rows = [
            rec(Route::Tensor, 1, 1.0, None),
            rec(Route::McProduct, 2, 0.5, Some(0.1)),
        ];
        assert!(compare_report(&rows, 0.0).comparisons.is_empty());
    }
}
