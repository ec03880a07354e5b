use std::collections::BTreeSet;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::spec::CurveSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Tensor,
    McProduct,
    McExponential,
    Kernel,
    LimitMc,
    LimitOde,
    Expansion,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Tensor => "tensor",
            Route::McProduct => "mc-product",
            Route::McExponential => "mc-exponential",
            Route::Kernel => "kernel",
            Route::LimitMc => "limit-mc",
            Route::LimitOde => "limit-ode",
            Route::Expansion => "expansion",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(
            self,
            Route::McProduct | Route::McExponential | Route::Kernel | Route::LimitMc
        )
    }

    /// Routes that read `|γ''|` and so reject piecewise-linear curves.
    pub fn needs_curvature(self) -> bool {
        matches!(self, Route::LimitMc | Route::LimitOde | Route::Expansion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by `run` and `compare`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Curve-spec file (flat TOML with a `kind` key).
    #[arg(long, value_name = "PATH")]
    pub curve: Option<String>,
    /// Inline curve spec; `;` separates keys, e.g. 'kind="circle-arc"; curvature=1; length=1'.
    #[arg(long, value_name = "SPEC", conflicts_with = "curve")]
    pub curve_inline: Option<String>,
    /// Second curve for the kernel route.
    #[arg(long, value_name = "PATH")]
    pub curve_b: Option<String>,
    /// Degrees: comma-separated values or inclusive ranges, e.g. `1..5,8`.
    #[arg(long, value_name = "LIST")]
    pub degrees: Option<String>,
    /// Route to evaluate; repeat for several.
    #[arg(long = "route", value_enum, value_name = "NAME")]
    pub routes: Vec<Route>,
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    pub replicates: usize,
    /// Top-level seed; required by Monte Carlo routes.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Number of arcsine-series terms kept by the kernel route.
    #[arg(long, value_name = "M", default_value_t = 8)]
    pub truncation: usize,
    /// Bridge grid size for the limit routes.
    #[arg(long, value_name = "N", default_value_t = 1000)]
    pub grid: usize,
    /// Chords used when the tensor route samples a smooth curve.
    #[arg(long, value_name = "N", default_value_t = 512)]
    pub segments: usize,
    /// Absolute tolerance for exact-match comparison of deterministic rows.
    #[arg(long, value_name = "X", default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Write `wall_ms` as 0 so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Reload the `config` block of an earlier JSON output; `--out`,
    /// `--format` and `--no-timing` still apply.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["curve", "curve_inline", "curve_b", "degrees", "routes", "seed"])]
    pub config: Option<String>,
}

/// Everything that determines a run's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub curve: CurveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_b: Option<CurveSpec>,
    pub degrees: Vec<usize>,
    pub routes: Vec<Route>,
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub truncation: usize,
    pub grid: usize,
    pub segments: usize,
    pub tolerance: f64,
}

/// Parses `1..5,8,10..=12` into a sorted, deduplicated list.
pub fn parse_degrees(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = |part: &str| CliError::validation("bad-degrees", format!("cannot parse degree list entry {part:?}"));
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: usize = lo.trim().parse().map_err(|_| bad(part))?;
            let hi: usize = hi.trim().parse().map_err(|_| bad(part))?;
            if lo > hi {
                return Err(bad(part));
            }
            out.extend(lo..=hi);
        } else {
            out.insert(part.parse().map_err(|_| bad(part))?);
        }
    }
    if out.is_empty() {
        return Err(CliError::validation("bad-degrees", "degree list is empty"));
    }
    Ok(out.into_iter().collect())
}

impl ResolvedConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::validation("config-unreadable", format!("{path}: {e}")))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::validation("bad-config", format!("{path}: {e}")))?;
            let block = value.get("config").cloned().unwrap_or(value);
            let config: ResolvedConfig = serde_json::from_value(block)
                .map_err(|e| CliError::validation("bad-config", format!("{path}: {e}")))?;
            config.validate()?;
            return Ok(config);
        }
        let curve = match (&args.curve, &args.curve_inline) {
            (Some(path), _) => CurveSpec::load(path)?,
            (None, Some(inline)) => CurveSpec::parse(&inline.replace(';', "\n"), "--curve-inline")?,
            (None, None) => {
                return Err(CliError::validation(
                    "missing-curve",
                    "--curve or --curve-inline is required",
                ))
            }
        };
        let curve_b = args.curve_b.as_deref().map(CurveSpec::load).transpose()?;
        let degrees = match &args.degrees {
            Some(text) => parse_degrees(text)?,
            None => return Err(CliError::validation("missing-degrees", "--degrees is required")),
        };
        let mut routes = args.routes.clone();
        routes.sort();
        routes.dedup();
        let config = ResolvedConfig {
            curve,
            curve_b,
            degrees,
            routes,
            replicates: args.replicates,
            seed: args.seed,
            truncation: args.truncation,
            grid: args.grid,
            segments: args.segments,
            tolerance: args.tolerance,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.routes.is_empty() {
            return Err(CliError::validation(
                "missing-route",
                "at least one --route is required",
            ));
        }
        if self.degrees.contains(&0) {
            return Err(CliError::validation("bad-degrees", "degrees must be ≥ 1"));
        }
        let random = self.routes.iter().any(|r| r.is_random());
        if random && self.replicates < 2 {
            return Err(CliError::validation(
                "bad-replicates",
                "Monte Carlo routes need --replicates ≥ 2",
            ));
        }
        if random && self.seed.is_none() {
            return Err(CliError::validation("missing-seed", "Monte Carlo routes need --seed"));
        }
        if self.routes.contains(&Route::Kernel) && self.curve_b.is_none() {
            return Err(CliError::validation(
                "missing-curve-b",
                "the kernel route needs --curve-b",
            ));
        }
        if self.truncation == 0 || self.grid == 0 || self.segments == 0 {
            return Err(CliError::validation(
                "bad-parameter",
                "--truncation, --grid and --segments must be ≥ 1",
            ));
        }
        if !(self.tolerance >= 0.0) {
            return Err(CliError::validation("bad-tolerance", "--tolerance must be ≥ 0"));
        }
        let curve = self.curve.build()?;
        if let Some(b) = &self.curve_b {
            let b = b.build()?;
            if b.dim() != curve.dim() {
                return Err(CliError::validation(
                    "dimension-mismatch",
                    format!("curve has dimension {}, curve-b has {}", curve.dim(), b.dim()),
                ));
            }
        }
        if curve.vertices().is_some() {
            if let Some(r) = self.routes.iter().find(|r| r.needs_curvature()) {
                return Err(CliError::validation(
                    "route-needs-curvature",
                    format!(
                        "route {} needs a curve with non-vanishing curvature, got {}",
                        r.name(),
                        curve.kind().name()
                    ),
                ));
            }
        }
        Ok(())
    }
}
