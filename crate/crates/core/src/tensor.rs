//! Truncated signatures in the free tensor algebra over `R^d`.
//!
//! Signatures of piecewise-linear paths are built from segment exponentials
//! with Chen's identity. The module also carries the closed forms available
//! for concatenations of orthogonal segments, where the squared
//! Hilbert–Schmidt norm of `n!·X^n` is the collision probability of a
//! multinomial law.

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::numeric::{ln_factorials_compensated, pairwise_sum, Compensated};

/// Degree above which multinomial coefficients are formed in log-space.
const LOG_SPACE_DEGREE: usize = 30;

/// Levels `0..=depth` of a tensor series; level `k` holds `d^k`
/// coordinates in row-major word order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensorSeries {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl TruncatedTensorSeries {
    /// The unit `1 + 0 + 0 + …`.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut levels: Vec<Vec<f64>> = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
        levels[0][0] = 1.0;
        Self { dim, depth, levels }
    }

    /// Builds a series from explicit levels, checking the level sizes.
    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("a tensor series needs level 0".into()));
        }
        for (k, level) in levels.iter().enumerate() {
            let expected = dim.pow(k as u32);
            if level.len() != expected {
                return Err(Error::SizeMismatch {
                    left: expected,
                    right: level.len(),
                });
            }
        }
        Ok(Self {
            dim,
            depth: levels.len() - 1,
            levels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.depth != other.depth {
            return Err(Error::DimensionMismatch {
                left: self.depth,
                right: other.depth,
            });
        }
        Ok(())
    }
}

/// Signature of the straight segment `t ↦ t·v`: level `k` is `v^{⊗k}/k!`.
pub fn segment_exponential(v: &[f64], depth: usize) -> TruncatedTensorSeries {
    let dim = v.len();
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![1.0]);
    for k in 1..=depth {
        let prev: &Vec<f64> = &levels[k - 1];
        let inv_k = 1.0 / k as f64;
        let next: Vec<f64> = prev
            .iter()
            .flat_map(|&p| v.iter().map(move |&x| p * x * inv_k))
            .collect();
        levels.push(next);
    }
    TruncatedTensorSeries { dim, depth, levels }
}

/// Truncated tensor product: level `n` is `Σ_k a_k ⊗ b_{n-k}`.
///
/// Each output coordinate is the pairwise sum of its `n + 1` terms taken in
/// order of `k`, so the result does not depend on how levels are scheduled.
pub fn chen_product(a: &TruncatedTensorSeries, b: &TruncatedTensorSeries) -> Result<TruncatedTensorSeries> {
    a.check_compatible(b)?;
    let d = a.dim;
    let levels = (0..=a.depth)
        .map(|n| {
            let size = d.pow(n as u32);
            let terms_per = n + 1;
            let mut terms = vec![0.0; size * terms_per];
            for k in 0..=n {
                let left = &a.levels[k];
                let right = &b.levels[n - k];
                let block = right.len();
                for (p, &x) in left.iter().enumerate() {
                    if x == 0.0 {
                        continue;
                    }
                    let base = p * block;
                    for (s, &y) in right.iter().enumerate() {
                        terms[(base + s) * terms_per + k] = x * y;
                    }
                }
            }
            terms.chunks_exact(terms_per).map(pairwise_sum).collect()
        })
        .collect();
    Ok(TruncatedTensorSeries {
        dim: d,
        depth: a.depth,
        levels,
    })
}

/// Signature of a piecewise-linear curve (polyline or axis path), as the
/// ordered Chen product of its segment exponentials.
pub fn signature(path: &Curve, depth: usize) -> Result<TruncatedTensorSeries> {
    let vertices = path.vertices().ok_or_else(|| {
        Error::InvalidCurve(format!(
            "signature needs a piecewise-linear curve, got {}",
            path.kind().name()
        ))
    })?;
    signature_of_vertices(&vertices, depth)
}

/// Signature of the polyline through `vertices`.
pub fn signature_of_vertices(vertices: &[Vec<f64>], depth: usize) -> Result<TruncatedTensorSeries> {
    let dim = vertices.first().map_or(0, Vec::len);
    let mut acc = TruncatedTensorSeries::identity(dim, depth);
    for w in vertices.windows(2) {
        if w[1].len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: w[1].len(),
            });
        }
        let step: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        acc = chen_product(&acc, &segment_exponential(&step, depth))?;
    }
    Ok(acc)
}

/// Hilbert–Schmidt inner product of level `n`.
pub fn hs_inner(a: &TruncatedTensorSeries, b: &TruncatedTensorSeries, n: usize) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    if n > a.depth || n > b.depth {
        return Err(Error::Domain(format!(
            "level {n} exceeds truncation depth {}",
            a.depth.min(b.depth)
        )));
    }
    let products: Vec<f64> = a.levels[n].iter().zip(&b.levels[n]).map(|(x, y)| x * y).collect();
    Ok(pairwise_sum(&products))
}

pub fn hs_norm(a: &TruncatedTensorSeries, n: usize) -> Result<f64> {
    Ok(hs_inner(a, a, n)?.sqrt())
}

/// Multinomial law `(n; l_1, …, l_m)` attached to the concatenation of `m`
/// orthogonal segments of lengths `l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialSpec {
    weights: Vec<f64>,
    degree: usize,
}

impl MultinomialSpec {
    pub fn new(weights: Vec<f64>, degree: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("at least one weight is required".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidSpec("weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { weights, degree })
    }

    /// Equal weights `1/m`.
    pub fn uniform(m: usize, degree: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m], degree)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn with_degree(&self, degree: usize) -> Self {
        Self {
            weights: self.weights.clone(),
            degree,
        }
    }

    /// The axis path `l_1 e_1 * … * l_m e_m` in `R^m`.
    pub fn axis_curve(&self) -> Result<Curve> {
        let segments: Vec<(usize, f64)> = self.weights.iter().copied().enumerate().collect();
        Curve::axis_path(self.weights.len(), &segments)
    }

    /// Log-probabilities of every composition `k` of the degree.
    pub fn log_pmf(&self) -> Vec<f64> {
        let n = self.degree;
        let log_weights: Vec<f64> = self.weights.iter().map(|w| w.ln()).collect();
        let mut out = Vec::new();
        if n > LOG_SPACE_DEGREE {
            // Entries of the table reach n·ln n; differencing them in plain
            // f64 would leave errors well above the pmf's own precision.
            let lf = ln_factorials_compensated(n);
            for_each_composition(self.weights.len(), n, |k| {
                let mut lp = lf[n];
                for (ki, lw) in k.iter().zip(&log_weights) {
                    lp = lp + Compensated::product(*ki as f64, *lw) + -lf[*ki];
                }
                out.push(lp.value());
            });
        } else {
            let fact: Vec<f64> = (0..=n)
                .scan(1.0, |acc, k| {
                    if k > 0 {
                        *acc *= k as f64;
                    }
                    Some(*acc)
                })
                .collect();
            for_each_composition(self.weights.len(), n, |k| {
                let mut p = fact[n];
                for (ki, w) in k.iter().zip(&self.weights) {
                    p *= w.powi(*ki as i32) / fact[*ki];
                }
                out.push(p.ln());
            });
        }
        out
    }
}

/// Visits all compositions of `n` into `m` nonnegative parts in colex order,
/// starting at `(n, 0, …, 0)`.
pub fn for_each_composition<F: FnMut(&[usize])>(m: usize, n: usize, mut visit: F) {
    if m == 0 {
        return;
    }
    let mut k = vec![0usize; m];
    k[0] = n;
    loop {
        visit(&k);
        if k[m - 1] == n {
            break;
        }
        let i = k.iter().position(|&x| x > 0).unwrap();
        let t = k[i];
        k[i] = 0;
        k[0] = t - 1;
        k[i + 1] += 1;
    }
}

/// `‖n!·X^n‖²` for the orthogonal axis path, by exact enumeration of the
/// multinomial collision probability `Σ_k μ_n({k})²`.
pub fn axis_norm_squared(spec: &MultinomialSpec) -> f64 {
    let squares: Vec<f64> = spec.log_pmf().into_iter().map(|lp| (2.0 * lp).exp()).collect();
    pairwise_sum(&squares)
}

/// Rényi entropy `H_α` of the multinomial law, by exact enumeration.
pub fn renyi_entropy(spec: &MultinomialSpec, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "Rényi order must be positive and different from 1, got {alpha}"
        )));
    }
    let scaled: Vec<f64> = spec.log_pmf().into_iter().map(|lp| alpha * lp).collect();
    let top = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = scaled.iter().map(|s| (s - top).exp()).collect();
    Ok((top + pairwise_sum(&shifted).ln()) / (1.0 - alpha))
}

/// Laplace approximation `2√(πn) Π_j (4πn l_j)^{-1/2}` of
/// [`axis_norm_squared`].
pub fn laplace_norm_approx(spec: &MultinomialSpec) -> Result<f64> {
    if spec.degree == 0 {
        return Err(Error::Domain("the Laplace approximation needs n ≥ 1".into()));
    }
    let n = spec.degree as f64;
    let pi = std::f64::consts::PI;
    let log = (2.0 * (pi * n).sqrt()).ln() - 0.5 * spec.weights.iter().map(|l| (4.0 * pi * n * l).ln()).sum::<f64>();
    Ok(log.exp())
}

/// Coefficient `κ₄/(16σ⁴) = (1 − 6σ²)/(16σ²)` of the `1/n` term in the
/// expansion of `H₂` for two orthogonal segments, `σ² = l(1 − l)`.
pub fn h2_correction_coefficient(l: f64) -> f64 {
    let var = l * (1.0 - l);
    (1.0 - 6.0 * var) / (16.0 * var)
}

/// Large-`n` expansion of `H₂` for the two-segment axis path with lengths
/// `(l, 1 − l)`:
///
/// `H₂ ≈ ½ log(4πσ²n) − (1 − 6σ²)/(16σ²) · 1/n`.
///
/// `terms = 0` keeps only the logarithm; `terms ≥ 1` adds the `1/n` term.
pub fn h2_expansion(l: f64, n: usize, terms: usize) -> Result<f64> {
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::Domain(format!("segment share must lie in (0, 1), got {l}")));
    }
    if n == 0 {
        return Err(Error::Domain("the expansion needs n ≥ 1".into()));
    }
    let var = l * (1.0 - l);
    let n = n as f64;
    let lead = 0.5 * (4.0 * std::f64::consts::PI * var * n).ln();
    if terms == 0 {
        Ok(lead)
    } else {
        Ok(lead - h2_correction_coefficient(l) / n)
    }
}
