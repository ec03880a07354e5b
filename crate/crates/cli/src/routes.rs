//! Evaluation of each route on a resolved configuration.
//!
//! Every route reports the normalized squared norm `(n!‖Xⁿ‖/lⁿ)²` or its
//! estimate, except `expansion`, which reports the first curvature term.
//! The limit routes report `r = lim (n!‖Xⁿ‖/lⁿ)²`, repeated for each degree.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sigasym::curves::{curvature_profile, sample_polyline, CurvatureProfile, Curve};
use sigasym::limit::{expansion_terms, r_nd_mc, r_nd_ode};
use sigasym::orderstats::{kernel_estimator, norm_estimator, EstimatorForm};
use sigasym::rng::McConfig;
use sigasym::tensor::{hs_inner, signature};

use crate::config::{ResolvedConfig, Route};
use crate::error::CliError;

/// Cap on `dim^degree` coordinates for the tensor route.
const MAX_TENSOR_LEVEL: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub route: Route,
    pub degree: usize,
    pub value: f64,
    pub stderr: Option<f64>,
    pub wall_ms: f64,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

fn core(e: sigasym::error::Error) -> CliError {
    CliError::numerical("computation-failed", e.to_string())
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Runs every route and returns records sorted by `(route, degree)`.
pub fn evaluate(config: &ResolvedConfig) -> Result<Vec<Record>, CliError> {
    let curve = config.curve.build()?;
    let curve_b = config.curve_b.as_ref().map(|s| s.build()).transpose()?;
    let per_route: Vec<Result<Vec<Record>, CliError>> = config
        .routes
        .par_iter()
        .map(|&route| evaluate_route(route, config, &curve, curve_b.as_ref()))
        .collect();
    let mut records = Vec::new();
    for r in per_route {
        records.extend(r?);
    }
    records.sort_by(|a, b| (a.route.name(), a.degree).cmp(&(b.route.name(), b.degree)));
    if let Some(bad) = records.iter().find(|r| !r.value.is_finite()) {
        return Err(CliError::numerical(
            "non-finite-value",
            format!(
                "route {} degree {} produced {}",
                bad.route.name(),
                bad.degree,
                bad.value
            ),
        ));
    }
    Ok(records)
}

fn evaluate_route(
    route: Route,
    config: &ResolvedConfig,
    curve: &Curve,
    curve_b: Option<&Curve>,
) -> Result<Vec<Record>, CliError> {
    let mc = config.seed.map(|seed| McConfig::new(config.replicates, seed));
    let row = |degree, value, stderr, wall_ms| Record {
        route,
        degree,
        value,
        stderr,
        wall_ms,
        seed: if route.is_random() { config.seed } else { None },
        extra: BTreeMap::new(),
    };
    match route {
        Route::Tensor => {
            let start = Instant::now();
            let max = *config.degrees.iter().max().expect("validated non-empty");
            if curve
                .dim()
                .checked_pow(max as u32)
                .is_none_or(|size| size > MAX_TENSOR_LEVEL)
            {
                return Err(CliError::validation(
                    "tensor-too-large",
                    format!(
                        "level {max} in dimension {} exceeds {MAX_TENSOR_LEVEL} coordinates",
                        curve.dim()
                    ),
                ));
            }
            let path = if curve.vertices().is_some() {
                curve.clone()
            } else {
                sample_polyline(curve, config.segments).map_err(core)?
            };
            let sig = signature(&path, max).map_err(core)?;
            let l = path.length();
            let shared = ms(start);
            config
                .degrees
                .iter()
                .map(|&n| {
                    let start = Instant::now();
                    let inner = hs_inner(&sig, &sig, n).map_err(core)?;
                    let value = if n <= 170 {
                        let f: f64 = (1..=n).map(|k| k as f64).product();
                        f * f * inner / l.powi(2 * n as i32)
                    } else {
                        inner * (2.0 * (ln_factorial(n) - n as f64 * l.ln())).exp()
                    };
                    Ok(row(n, value, None, shared + ms(start)))
                })
                .collect()
        }
        Route::McProduct | Route::McExponential => {
            let form = if route == Route::McProduct {
                EstimatorForm::Product
            } else {
                EstimatorForm::Exponential
            };
            let mc = mc.expect("validated seed");
            config
                .degrees
                .iter()
                .map(|&n| {
                    let start = Instant::now();
                    let r = norm_estimator(curve, n, form, &mc).map_err(core)?;
                    Ok(row(n, r.mean, Some(r.stderr), ms(start)))
                })
                .collect()
        }
        Route::Kernel => {
            let b = curve_b.expect("validated curve-b");
            let mc = mc.expect("validated seed");
            config
                .degrees
                .iter()
                .map(|&n| {
                    let start = Instant::now();
                    let k = kernel_estimator(curve, b, n, config.truncation, &mc).map_err(core)?;
                    let mut rec = row(n, k.estimate.mean, Some(k.estimate.stderr), ms(start));
                    rec.extra.insert("first_omitted_term".into(), k.first_omitted_term);
                    Ok(rec)
                })
                .collect()
        }
        Route::LimitMc | Route::LimitOde => {
            let start = Instant::now();
            let profile = curvature_profile(curve, config.grid).map_err(core)?;
            let d = curve.length().powi(2) / 2.0;
            let (value, stderr) = if route == Route::LimitMc {
                let r = r_nd_mc(&profile, d, &mc.expect("validated seed"));
                (r.mean, Some(r.stderr))
            } else {
                (r_nd_ode(&profile, d).map_err(core)?, None)
            };
            let wall = ms(start);
            Ok(config.degrees.iter().map(|&n| row(n, value, stderr, wall)).collect())
        }
        Route::Expansion => {
            let l2 = curve.length().powi(2);
            config
                .degrees
                .iter()
                .map(|&n| {
                    let start = Instant::now();
                    let raw = curvature_profile(curve, n).map_err(core)?;
                    // unit-length normalization: Γ_j = l²|γ''(j l/n)|²
                    let scaled: Vec<f64> = raw.values().iter().map(|g| g * l2).collect();
                    let profile = CurvatureProfile::from_values(scaled, raw.lipschitz()).map_err(core)?;
                    let t = expansion_terms(&profile);
                    let mut rec = row(n, t.term1, None, ms(start));
                    rec.extra.insert("term2".into(), t.term2);
                    rec.extra.insert("xi2_sums".into(), t.xi2_sums);
                    Ok(rec)
                })
                .collect()
        }
    }
}
