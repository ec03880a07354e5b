//! Brownian-bridge exponential functionals and the Sturm–Liouville problem
//! `ψ'' = ψ·μ`, `ψ(0) = 0`, `ψ'(0) = 1`.
//!
//! For a bridge `B` and a nonnegative measure `μ` on `[0, 1]`,
//! `E[exp(−½ ∫ B² dμ)] = ψ(1)^{−1/2}`. The solvers never insert constant
//! factors: whatever normalization a formula uses goes into the measure
//! (the `scale` field of [`DiscreteMeasure`] or the density closure).
//!
//! Calibration against the tensor route on the circle of curvature `2π`:
//! the limit of `n!‖Xⁿ‖/lⁿ` is `ψ(1)^{−1/4}` for the density
//! `2l²|γ''|²`, i.e. `(2√2π / sinh 2√2π)^{1/4} ≈ 0.2227`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::curves::CurvatureProfile;
use crate::error::{Error, Result};
use crate::rng::{replicate, EstimatorResult, McConfig};

/// Atomic measure `scale · Σ w_i δ_{t_i}` on `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    scale: f64,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>, scale: f64) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::SizeMismatch {
                left: atoms.len(),
                right: weights.len(),
            });
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "scale must be finite and ≥ 0, got {scale}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "weights must be finite and ≥ 0, got {w}"
            )));
        }
        let mut prev = 0.0;
        for &t in &atoms {
            if !(t > prev && t <= 1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atoms must increase strictly inside (0, 1]; {t} follows {prev}"
                )));
            }
            prev = t;
        }
        Ok(Self { atoms, weights, scale })
    }

    /// Atoms at `j/n`, `j = 1..=n`, where `n = weights.len()`.
    pub fn uniform_grid(weights: Vec<f64>, scale: f64) -> Result<Self> {
        let n = weights.len();
        let atoms = (1..=n).map(|j| j as f64 / n as f64).collect();
        Self::new(atoms, weights, scale)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    /// Raw weights `w_i`, before the scale is applied.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Representation {
    /// `ψ(t) = a_j + b_j t` on `[knots[j], knots[j+1]]`.
    Segments {
        knots: Vec<f64>,
        intercepts: Vec<f64>,
        slopes: Vec<f64>,
    },
    /// RK4 nodes on a uniform grid, interpolated by cubic Hermite.
    Grid { values: Vec<f64>, derivatives: Vec<f64> },
}

/// Solution of `ψ'' = ψ·μ` on `[0, 1]` with `ψ(0) = 0`, `ψ'(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouvilleSolution {
    repr: Representation,
}

impl SturmLiouvilleSolution {
    pub fn psi0(&self) -> f64 {
        0.0
    }

    pub fn dpsi0(&self) -> f64 {
        1.0
    }

    /// `ψ(1)`.
    pub fn psi1(&self) -> f64 {
        self.psi(1.0)
    }

    pub fn psi(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match &self.repr {
            Representation::Segments {
                knots,
                intercepts,
                slopes,
            } => {
                let j = knots.partition_point(|&k| k <= t).saturating_sub(1);
                let j = j.min(slopes.len() - 1);
                intercepts[j] + slopes[j] * t
            }
            Representation::Grid { values, derivatives } => {
                let steps = values.len() - 1;
                let h = 1.0 / steps as f64;
                let j = ((t / h) as usize).min(steps - 1);
                let s = (t - j as f64 * h) / h;
                let (s2, s3) = (s * s, s * s * s);
                (2.0 * s3 - 3.0 * s2 + 1.0) * values[j]
                    + (s3 - 2.0 * s2 + s) * h * derivatives[j]
                    + (-2.0 * s3 + 3.0 * s2) * values[j + 1]
                    + (s3 - s2) * h * derivatives[j + 1]
            }
        }
    }

    /// `(knots, a_j, b_j)` for the piecewise-linear solution; knots start at 0
    /// and then list the atoms.
    pub fn segments(&self) -> Option<(&[f64], &[f64], &[f64])> {
        match &self.repr {
            Representation::Segments {
                knots,
                intercepts,
                slopes,
            } => Some((knots, intercepts, slopes)),
            Representation::Grid { .. } => None,
        }
    }
}

/// Exact solution for an atomic measure by forward recursion.
///
/// Starting from `ψ(t) = t`, each atom `t_i` with effective weight `w`
/// bends the line: `b' = b + w·ψ(t_i)`, `a' = ψ(t_i) − b'·t_i`.
///
/// # Panics
/// If `ψ(t_i) ≤ 0` at some atom, which nonnegative weights rule out.
pub fn solve_psi_discrete(mu: &DiscreteMeasure) -> SturmLiouvilleSolution {
    let n = mu.len();
    let mut knots = Vec::with_capacity(n + 1);
    let mut intercepts = Vec::with_capacity(n + 1);
    let mut slopes = Vec::with_capacity(n + 1);
    knots.push(0.0);
    intercepts.push(0.0);
    slopes.push(1.0);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for (&t, &w) in mu.atoms.iter().zip(&mu.weights) {
        let value = a + b * t;
        assert!(
            value > 0.0,
            "ψ({t}) = {value} is not positive; the measure has a negative weight"
        );
        b += mu.scale * w * value;
        a = value - b * t;
        knots.push(t);
        intercepts.push(a);
        slopes.push(b);
    }
    SturmLiouvilleSolution {
        repr: Representation::Segments {
            knots,
            intercepts,
            slopes,
        },
    }
}

const MAX_DOUBLINGS: usize = 20;

/// RK4 for `ψ'' = ρ(t)ψ` with step doubling until successive `ψ(1)` agree
/// within `tolerance` (relative to `max(1, ψ(1))`).
pub fn solve_psi_continuous<D>(density: D, tolerance: f64) -> Result<SturmLiouvilleSolution>
where
    D: Fn(f64) -> f64,
{
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    let mut steps = 64;
    let mut previous = rk4_linear(&density, steps)?;
    for _ in 0..MAX_DOUBLINGS {
        steps *= 2;
        let run = rk4_linear(&density, steps)?;
        let (p0, p1) = (*previous.0.last().unwrap(), *run.0.last().unwrap());
        previous = run;
        if (p1 - p0).abs() <= tolerance * p1.abs().max(1.0) {
            break;
        }
    }
    Ok(SturmLiouvilleSolution {
        repr: Representation::Grid {
            values: previous.0,
            derivatives: previous.1,
        },
    })
}

fn rk4_linear<D: Fn(f64) -> f64>(density: &D, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rho = |t: f64| {
        let r = density(t);
        if r.is_finite() && r >= 0.0 {
            Ok(r)
        } else {
            Err(Error::InvalidMeasure(format!(
                "density must be finite and ≥ 0; ρ({t}) = {r}"
            )))
        }
    };
    let h = 1.0 / steps as f64;
    let mut values = Vec::with_capacity(steps + 1);
    let mut derivatives = Vec::with_capacity(steps + 1);
    let (mut y, mut dy) = (0.0f64, 1.0f64);
    values.push(y);
    derivatives.push(dy);
    for k in 0..steps {
        let t = k as f64 * h;
        let (r0, rm, r1) = (rho(t)?, rho(t + 0.5 * h)?, rho(t + h)?);
        let (k1y, k1v) = (dy, r0 * y);
        let (k2y, k2v) = (dy + 0.5 * h * k1v, rm * (y + 0.5 * h * k1y));
        let (k3y, k3v) = (dy + 0.5 * h * k2v, rm * (y + 0.5 * h * k2y));
        let (k4y, k4v) = (dy + h * k3v, r1 * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        values.push(y);
        derivatives.push(dy);
    }
    Ok((values, derivatives))
}

/// Exponent applied to `ψ(1)` when forming the limit constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitExponent {
    /// `ψ(1)^{−l/4}`; matches the tensor route.
    Quarter,
    /// `ψ(1)^{−l/2}`.
    Half,
}

/// `c(l) = ψ(1)^{−l/4}` or `ψ(1)^{−l/2}`.
pub fn limit_constant(psi1: f64, exponent: LimitExponent, l: f64) -> Result<f64> {
    if !(psi1 > 0.0) {
        return Err(Error::Domain(format!("ψ(1) must be positive, got {psi1}")));
    }
    let e = match exponent {
        LimitExponent::Quarter => -l / 4.0,
        LimitExponent::Half => -l / 2.0,
    };
    Ok(psi1.powf(e))
}

/// `E[exp(−α ∫₀¹ B_s² ds)] = (√(2α) / sinh √(2α))^{1/2}`.
pub fn closed_form_bridge_exponential(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("α must be ≥ 0, got {alpha}")));
    }
    let x = (2.0 * alpha).sqrt();
    let ratio_ln = if x < 1e-3 {
        // x/sinh x = 1 − x²/6 + 7x⁴/360 − …
        (1.0 - x * x / 6.0 + 7.0 * x.powi(4) / 360.0).ln()
    } else {
        // ln sinh x = x − ln 2 + ln(1 − e^{−2x})
        x.ln() - (x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p())
    };
    Ok((0.5 * ratio_ln).exp())
}

/// Brownian bridge on the grid `j/n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgePath {
    values: Vec<f64>,
}

impl BridgePath {
    /// Grid size `n`.
    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    /// `B_{j/n}` for `j = 0..=n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `B_{j/n} = W_{j/n} − (j/n)·W_1` from `n` Gaussian increments.
pub fn sample_bridge<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BridgePath {
    let n = n.max(1);
    let step = (1.0 / n as f64).sqrt();
    let mut walk = Vec::with_capacity(n + 1);
    walk.push(0.0f64);
    let mut w = 0.0f64;
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        w += step * z;
        walk.push(w);
    }
    let end = walk[n];
    let values = walk
        .iter()
        .enumerate()
        .map(|(j, &wj)| if j == n { 0.0 } else { wj - (j as f64 / n as f64) * end })
        .collect();
    BridgePath { values }
}

/// Monte Carlo `E[exp(−Σ_{j=1}^n w_j B²_{j/n})]` with `n = weights.len()`.
pub fn bridge_quadratic_mc(weights: &[f64], config: &McConfig) -> EstimatorResult {
    let n = weights.len();
    replicate(config, |rng| {
        let path = sample_bridge(n, rng);
        let s: f64 = weights.iter().zip(&path.values[1..]).map(|(w, b)| w * b * b).sum();
        (-s).exp()
    })
}

/// Riemann-sum Monte Carlo of `E[exp(−α ∫ B²)]` on a grid of size `grid`.
pub fn bridge_exponential_mc(alpha: f64, grid: usize, config: &McConfig) -> EstimatorResult {
    let grid = grid.max(1);
    bridge_quadratic_mc(&vec![alpha / grid as f64; grid], config)
}

/// `r_{n,D} = E[exp(−(2D/n) Σ_{j=1}^n Γ_j B²_{j/n})]` by Monte Carlo.
pub fn r_nd_mc(profile: &CurvatureProfile, d: f64, config: &McConfig) -> EstimatorResult {
    let n = profile.grid();
    let weights: Vec<f64> = profile.values()[1..].iter().map(|g| 2.0 * d / n as f64 * g).collect();
    bridge_quadratic_mc(&weights, config)
}

/// `r_{n,D}` as `ψ(1)^{−1/2}` for atoms `j/n` with weights `(4D/n)Γ_j`.
pub fn r_nd_ode(profile: &CurvatureProfile, d: f64) -> Result<f64> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::Domain(format!("D must be finite and ≥ 0, got {d}")));
    }
    let n = profile.grid();
    let mu = DiscreteMeasure::uniform_grid(profile.values()[1..].to_vec(), 4.0 * d / n as f64)?;
    Ok(solve_psi_discrete(&mu).psi1().powf(-0.5))
}

/// Raw sums behind the first two curvature corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    /// `(2/n⁴) Σ_{i=1}^{n−1} Σ_{s=1}^{i} s·Γ_s`.
    pub term1: f64,
    /// `xi2_sums / n⁶`; the leading constant is left to the caller.
    pub term2: f64,
    /// `Σ_{i=1}^{n−1} ξ₂^i`.
    pub xi2_sums: f64,
}

/// `ξ₂^j = Σ_{1≤s₁<s₂≤j} (Σ_{s≤s₁} s·Γ_s) · Γ_{s₂}`.
pub fn xi2(profile: &CurvatureProfile, j: usize) -> f64 {
    let mut inner = 0.0; // Σ_{s≤k} sΓ_s
    let mut outer = 0.0; // Σ_{s₁≤k} inner(s₁)
    let mut total = 0.0;
    for s in 1..=j.min(profile.grid()) {
        if s >= 2 {
            total += profile.gamma(s) * outer;
        }
        inner += s as f64 * profile.gamma(s);
        outer += inner;
    }
    total
}

pub fn expansion_terms(profile: &CurvatureProfile) -> ExpansionTerms {
    let n = profile.grid();
    let (mut inner, mut outer) = (0.0, 0.0);
    let (mut xi, mut term1_sum, mut xi2_sums) = (0.0, 0.0, 0.0);
    for i in 1..n {
        if i >= 2 {
            xi += profile.gamma(i) * outer;
        }
        inner += i as f64 * profile.gamma(i);
        outer += inner;
        term1_sum += inner;
        xi2_sums += xi;
    }
    let nf = n as f64;
    ExpansionTerms {
        term1: 2.0 * term1_sum / nf.powi(4),
        term2: xi2_sums / nf.powi(6),
        xi2_sums,
    }
}
