//! One-dimensional optimal transport and the curvature distribution.
//!
//! [`DistributionF`] solves `F' = 1/κ̃(F)`, `F(0) = 0`, where `κ̃` is the
//! curvature of the curve rescaled to unit length (`κ̃(s) = l·|γ''(l s)|`).
//! It stops at `τ = inf{F = 1}`, so `τ = ∫₀¹ κ̃` is the total turning.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::curves::{Curve, CurveKind};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, simpson, MonotoneCubic};
use crate::orderstats::OrderStatSample;
use crate::rng::{replicate, EstimatorResult, McConfig};

/// Default composite Simpson node count for [`j_p_functional`] and
/// [`k_p_functional`].
pub const DEFAULT_QUADRATURE_POINTS: usize = 4097;

/// Default step-halving tolerance for [`solve_distribution`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MIN_CURVATURE: f64 = 1e-9;
const MAX_HALVINGS: usize = 24;

/// Sorted sample with uniform weights `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Sorts `points`; rejects empty or non-finite input.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure(
                "empirical measure needs at least one point".into(),
            ));
        }
        if let Some(x) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite sample point {x}")));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Order statistics `x_(1) ≤ … ≤ x_(n)`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

fn check_order(p: u32) -> Result<()> {
    if p == 0 {
        Err(Error::Domain("transport order p must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `Σ_j |a_(j) − b_(j)|^p`, the sorted-matching cost `n·W_p^p`.
pub fn matching_cost(a: &EmpiricalMeasure, b: &EmpiricalMeasure, p: u32) -> Result<f64> {
    check_order(p)?;
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let terms: Vec<f64> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(x, y)| (x - y).abs().powi(p as i32))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `W_p^p` between equal-size empirical measures.
pub fn wasserstein_pp(a: &EmpiricalMeasure, b: &EmpiricalMeasure, p: u32) -> Result<f64> {
    Ok(matching_cost(a, b, p)? / a.len() as f64)
}

/// `W_p` between equal-size empirical measures.
pub fn wasserstein_p(a: &EmpiricalMeasure, b: &EmpiricalMeasure, p: u32) -> Result<f64> {
    Ok(wasserstein_pp(a, b, p)?.powf(1.0 / p as f64))
}

type CurvatureFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tabulated solution of the curvature-distribution ODE.
///
/// `F` is 0 before `t = 0` and 1 after `τ`. Between grid points it is the
/// monotone cubic through the RK4 nodes with exact ODE slopes; the inverse
/// uses the same nodes with swapped axes.
#[derive(Clone)]
pub struct DistributionF {
    times: Vec<f64>,
    values: Vec<f64>,
    tau: f64,
    forward: MonotoneCubic,
    inverse: MonotoneCubic,
    curvature: CurvatureFn,
}

impl fmt::Debug for DistributionF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionF")
            .field("tau", &self.tau)
            .field("nodes", &self.times.len())
            .finish()
    }
}

impl DistributionF {
    /// Terminal time `τ`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// RK4 nodes `(t_k, F(t_k))`, ending at `(τ, 1)`.
    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.times, &self.values)
    }

    /// Unit-length curvature `κ̃(s)` at curve fraction `s ∈ [0, 1]`.
    pub fn curvature(&self, s: f64) -> f64 {
        (self.curvature)(s.clamp(0.0, 1.0))
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= self.tau {
            1.0
        } else {
            self.forward.eval(t)
        }
    }

    /// Density `f(t) = F'(t) = 1/κ̃(F(t))` on `[0, τ]`, zero outside.
    pub fn density(&self, t: f64) -> f64 {
        if !(0.0..=self.tau).contains(&t) {
            return 0.0;
        }
        1.0 / self.curvature(self.eval(t))
    }

    /// Quantile function `F⁻¹(u)` for `u ∈ [0, 1]` (clamped).
    pub fn inverse(&self, u: f64) -> f64 {
        self.inverse.eval(u.clamp(0.0, 1.0))
    }
}

/// Solves the distribution ODE for a curve with non-vanishing curvature.
pub fn solve_distribution(curve: &Curve, tolerance: f64) -> Result<DistributionF> {
    match curve.kind() {
        CurveKind::Polyline | CurveKind::AxisPath => {
            return Err(Error::NonIntegrable {
                at: 0.0,
                curvature: 0.0,
            })
        }
        _ => {}
    }
    let l = curve.length();
    let c = curve.clone();
    solve_distribution_with(move |s| l * c.curvature_at(l * s).unwrap_or(f64::NAN), tolerance)
}

/// Solves `F' = 1/κ̃(F)` for a unit-length curvature function `κ̃` on `[0, 1]`.
pub fn solve_distribution_with<K>(curvature: K, tolerance: f64) -> Result<DistributionF>
where
    K: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    let curvature: CurvatureFn = Arc::new(curvature);
    // τ = ∫₀¹ κ̃ sizes the first step.
    let tau_guess = simpson(|s| curvature(s.clamp(0.0, 1.0)), 0.0, 1.0, 65);
    if !(tau_guess.is_finite() && tau_guess > 0.0) {
        return Err(Error::NonIntegrable {
            at: 0.0,
            curvature: tau_guess,
        });
    }
    let mut h = tau_guess / 64.0;
    let mut previous = integrate(&curvature, h)?;
    let mut accepted = None;
    for _ in 0..MAX_HALVINGS {
        h /= 2.0;
        let run = integrate(&curvature, h)?;
        let done = (run.tau - previous.tau).abs() <= tolerance;
        previous = run;
        if done {
            accepted = Some(previous.clone());
            break;
        }
    }
    let run = accepted.unwrap_or(previous);
    let slopes: Vec<f64> = run.values.iter().map(|&y| 1.0 / curvature(y)).collect();
    let inv_slopes: Vec<f64> = run.values.iter().map(|&y| curvature(y)).collect();
    let forward = MonotoneCubic::new(run.times.clone(), run.values.clone(), slopes);
    let inverse = MonotoneCubic::new(run.values.clone(), run.times.clone(), inv_slopes);
    Ok(DistributionF {
        tau: run.tau,
        times: run.times,
        values: run.values,
        forward,
        inverse,
        curvature,
    })
}

#[derive(Clone)]
struct Run {
    times: Vec<f64>,
    values: Vec<f64>,
    tau: f64,
}

fn rate(curvature: &CurvatureFn, y: f64) -> Result<f64> {
    let k = curvature(y.clamp(0.0, 1.0));
    if !(k.is_finite() && k >= MIN_CURVATURE) {
        return Err(Error::NonIntegrable { at: y, curvature: k });
    }
    Ok(1.0 / k)
}

fn rk4_step(curvature: &CurvatureFn, y: f64, h: f64) -> Result<f64> {
    let k1 = rate(curvature, y)?;
    let k2 = rate(curvature, y + 0.5 * h * k1)?;
    let k3 = rate(curvature, y + 0.5 * h * k2)?;
    let k4 = rate(curvature, y + h * k3)?;
    Ok(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

fn integrate(curvature: &CurvatureFn, h: f64) -> Result<Run> {
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let (mut t, mut y) = (0.0f64, 0.0f64);
    loop {
        let next = rk4_step(curvature, y, h)?;
        if next < 1.0 {
            t += h;
            y = next;
            times.push(t);
            values.push(y);
            continue;
        }
        // Final partial step: bisect on the step length.
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if rk4_step(curvature, y, mid)? < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = t + hi;
        if hi <= 1e-12 * h && times.len() > 1 {
            times.pop();
            values.pop();
        }
        times.push(tau);
        values.push(1.0);
        return Ok(Run { times, values, tau });
    }
}

/// `X_(i) = F⁻¹(U_(i))`, `Y_(i) = F⁻¹(V_(i))`.
pub fn inverse_transform(f: &DistributionF, sample: &OrderStatSample) -> (EmpiricalMeasure, EmpiricalMeasure) {
    let map = |s: &[f64]| EmpiricalMeasure {
        points: s.iter().map(|&u| f.inverse(u)).collect(),
    };
    (map(sample.u()), map(sample.v()))
}

/// Factors `(1 ∓ M·L·y)^p` bracketing the speed difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFactors {
    pub lower: f64,
    pub upper: f64,
    /// `M·L·y ≥ 1`: the lower factor is clamped to 0 and the bound is vacuous.
    pub degenerate: bool,
}

pub fn bound_factors(m: f64, l: f64, y: f64, p: u32) -> Result<BoundFactors> {
    if !(m >= 0.0 && l >= 0.0 && y >= 0.0) {
        return Err(Error::Domain(format!(
            "bound factors need M, L, y ≥ 0 (got {m}, {l}, {y})"
        )));
    }
    let mly = m * l * y;
    let degenerate = mly >= 1.0;
    let lower = if degenerate { 0.0 } else { (1.0 - mly).powi(p as i32) };
    Ok(BoundFactors {
        lower,
        upper: (1.0 + mly).powi(p as i32),
        degenerate,
    })
}

/// `J_p = ∫ [F(1−F)]^{p/2} / f^{p−1} dt` for even `p ≥ 2`.
pub fn j_p_functional(f: &DistributionF, p: u32, points: usize) -> Result<f64> {
    if p < 2 || !p.is_multiple_of(2) {
        return Err(Error::Domain(format!("J_p needs an even order p ≥ 2, got {p}")));
    }
    let half = (p / 2) as i32;
    let integrand = |t: f64| {
        let u = f.eval(t);
        let dens = f.density(t);
        (u * (1.0 - u)).powi(half) / dens.powi(p as i32 - 1)
    };
    Ok(simpson(integrand, 0.0, f.tau(), points))
}

/// `K_p = ∫ |x|^{p−1} √(F(1−F)) dx` for `p ≥ 1`.
pub fn k_p_functional(f: &DistributionF, p: u32, points: usize) -> Result<f64> {
    check_order(p)?;
    let integrand = |t: f64| {
        let u = f.eval(t);
        t.abs().powi(p as i32 - 1) * (u * (1.0 - u)).max(0.0).sqrt()
    };
    Ok(simpson(integrand, 0.0, f.tau(), points))
}

/// Upper bound `(5p/√(n+2))^p · J_p` on `E[W_p^p(μ_n, μ)]`.
pub fn expected_wasserstein_bound(f: &DistributionF, p: u32, n: usize) -> Result<f64> {
    let j = j_p_functional(f, p, DEFAULT_QUADRATURE_POINTS)?;
    Ok((5.0 * p as f64 / ((n + 2) as f64).sqrt()).powi(p as i32) * j)
}

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GAUSS_NODES
        .iter()
        .zip(GAUSS_WEIGHTS)
        .map(|(x, w)| w * g(mid + half * x))
        .sum::<f64>()
        * half
}

/// `W_p^p(μ_n, μ) = ∫₀¹ |Q_n(u) − F⁻¹(u)|^p du` for the empirical measure
/// of `sample` against `F`. Each quantile cell is split where the two
/// quantile functions cross.
pub fn wasserstein_to_distribution(f: &DistributionF, sample: &EmpiricalMeasure, p: u32) -> Result<f64> {
    check_order(p)?;
    let n = sample.len() as f64;
    let terms: Vec<f64> = sample
        .points()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let (a, b) = (j as f64 / n, (j + 1) as f64 / n);
            let g = |u: f64| (x - f.inverse(u)).abs().powi(p as i32);
            let cross = f.eval(x);
            if cross > a && cross < b {
                gauss(g, a, cross) + gauss(g, cross, b)
            } else {
                gauss(g, a, b)
            }
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Monte Carlo mean of `W_p^p(μ_n, μ)` with `μ_n` drawn from `F`.
pub fn expected_wasserstein_mc(f: &DistributionF, p: u32, n: usize, config: &McConfig) -> Result<EstimatorResult> {
    check_order(p)?;
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    Ok(replicate(config, |rng| {
        let points: Vec<f64> = (0..n).map(|_| f.inverse(rng.random::<f64>())).collect();
        let measure = EmpiricalMeasure::new(points).expect("quantiles are finite");
        wasserstein_to_distribution(f, &measure, p).expect("order checked")
    }))
}
