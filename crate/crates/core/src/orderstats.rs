//! Monte Carlo estimators of signature norms and kernels built on two
//! independent samples of uniform order statistics.
//!
//! For unit-speed curves `a`, `b` of lengths `l_a`, `l_b`,
//!
//! ```text
//! (n!)² ⟨S(a)^n, S(b)^n⟩ / (l_a l_b)^n = E[ Π_j ⟨a'(l_a U_(j)), b'(l_b V_(j))⟩ ]
//! ```
//!
//! which is the product form. Writing `Q_j = cos Θ_j` for the inner
//! products, the exponential form replaces `Π cos Θ_j` by
//! `exp(−½ Σ Θ_j²)`. The two agree only to leading order in the angles, so
//! both are kept and their gap is measurable.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::numeric::{ln_binomial, mean_and_stderr};
use crate::rng::{replicate, replicate_values, EstimatorResult, McConfig};

/// Two independent sorted samples of `n` uniforms on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatSample {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl OrderStatSample {
    /// Wraps two samples, sorting them.
    pub fn new(mut u: Vec<f64>, mut v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::SizeMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        if u.iter().chain(&v).any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Domain("uniform samples must lie in [0, 1]".into()));
        }
        u.sort_by(f64::total_cmp);
        v.sort_by(f64::total_cmp);
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// The same sample with the roles of `U` and `V` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// `y_n = max_j |U_(j) − V_(j)|`.
    pub fn max_gap(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

pub fn sample_order_stats<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrderStatSample {
    let mut draw = || {
        let mut s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        s.sort_by(f64::total_cmp);
        s
    };
    let u = draw();
    let v = draw();
    OrderStatSample { u, v }
}

/// `C(2k, k)⁻¹ / k²`, the coefficients of `2 asin(x/2)² = Σ_k c_k x^{2k}`.
pub fn series_coefficient(k: usize) -> f64 {
    assert!(k >= 1, "series coefficients start at k = 1");
    let kf = k as f64;
    if k > 25 {
        ln_series_coefficient(k).exp()
    } else {
        let mut binom = 1.0;
        for i in 1..=k {
            binom = binom * (k + i) as f64 / i as f64;
        }
        1.0 / (binom * kf * kf)
    }
}

/// `ln c_k`; finite even where `c_k` itself underflows.
fn ln_series_coefficient(k: usize) -> f64 {
    -ln_binomial(2 * k, k) - 2.0 * (k as f64).ln()
}

/// Partial sum `Σ_{k≤terms} c_k x^{2k}` of the arcsine series.
pub fn arcsine_series(x: f64, terms: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let log_x2 = (x * x).ln();
    (1..=terms)
        .map(|k| (ln_series_coefficient(k) + k as f64 * log_x2).exp())
        .sum()
}

/// `2 asin(x/2)²`, the closed form of the arcsine series on `[0, 2]`.
pub fn arcsine_closed_form(x: f64) -> f64 {
    let a = (x / 2.0).asin();
    2.0 * a * a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleFunctional {
    /// `Π_j cos θ_j`.
    pub product: f64,
    /// `exp(−½ Σ_j θ_j²)`.
    pub exponential: f64,
}

pub fn angle_sum_functional(thetas: &[f64]) -> Result<AngleFunctional> {
    if let Some(t) = thetas.iter().find(|t| !(0.0..=std::f64::consts::PI).contains(*t)) {
        return Err(Error::Domain(format!("angle {t} outside [0, π]")));
    }
    Ok(angle_functional_unchecked(thetas))
}

fn angle_functional_unchecked(thetas: &[f64]) -> AngleFunctional {
    let product = thetas.iter().map(|t| t.cos()).product();
    let half_sq: f64 = thetas.iter().map(|t| 0.5 * t * t).sum();
    AngleFunctional {
        product,
        exponential: (-half_sq).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorForm {
    /// `Π_j Q_j`, unbiased for the normalized squared norm.
    Product,
    /// `exp(−½ Σ_j Θ_j²)` with `Θ_j = arccos Q_j`.
    Exponential,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn tangent(curve: &Curve, s: f64) -> Vec<f64> {
    curve
        .evaluate(s * curve.length(), 1)
        .expect("order statistics lie in [0, 1]")
}

/// One replicate of [`norm_estimator`] on a given sample.
pub fn norm_replicate(curve: &Curve, sample: &OrderStatSample, form: EstimatorForm) -> f64 {
    let thetas: Vec<f64> = sample
        .u()
        .iter()
        .zip(sample.v())
        .map(|(&u, &v)| {
            let q = dot(&tangent(curve, u), &tangent(curve, v));
            match form {
                EstimatorForm::Product => q,
                EstimatorForm::Exponential => q.clamp(-1.0, 1.0).acos(),
            }
        })
        .collect();
    match form {
        EstimatorForm::Product => thetas.iter().product(),
        EstimatorForm::Exponential => angle_functional_unchecked(&thetas).exponential,
    }
}

/// Estimates `(n!·‖S(γ)^n‖ / l^n)²` from `config.replicates` order-statistic
/// draws; replicate `r` uses stream `r` of `config.seed`.
pub fn norm_estimator(curve: &Curve, degree: usize, form: EstimatorForm, config: &McConfig) -> Result<EstimatorResult> {
    if degree == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    curve.evaluate(0.0, 1)?;
    Ok(replicate(config, |rng: &mut ChaCha8Rng| {
        let sample = sample_order_stats(degree, rng);
        norm_replicate(curve, &sample, form)
    }))
}

/// Result of [`kernel_estimator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEstimate {
    pub estimate: EstimatorResult,
    /// Largest, over replicates, of the first omitted series term
    /// `c_{M+1} Σ_i x_i^{2M+2}`.
    pub first_omitted_term: f64,
}

/// Kernel approximation with the arcsine series truncated after
/// `truncation` terms:
///
/// ```text
/// (1/D) Σ_q exp(−Σ_{k≤M} c_k Σ_i |a'(U_(i)) − b'(V_(i))|^{2k})
/// ```
///
/// which targets `(n!)² ⟨S(a)^n, S(b)^n⟩ / (l_a l_b)^n` through the
/// exponential form.
pub fn kernel_estimator(
    a: &Curve,
    b: &Curve,
    degree: usize,
    truncation: usize,
    config: &McConfig,
) -> Result<KernelEstimate> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if degree == 0 || truncation == 0 {
        return Err(Error::Domain("degree and truncation must be at least 1".into()));
    }
    a.evaluate(0.0, 1)?;
    b.evaluate(0.0, 1)?;
    let coeffs: Vec<f64> = (1..=truncation + 1).map(series_coefficient).collect();
    let pairs = replicate_values(config, |rng: &mut ChaCha8Rng| {
        let sample = sample_order_stats(degree, rng);
        let mut exponent = 0.0;
        let mut omitted = 0.0;
        for (&u, &v) in sample.u().iter().zip(sample.v()) {
            let ta = tangent(a, u);
            let tb = tangent(b, v);
            let x2: f64 = ta.iter().zip(&tb).map(|(p, q)| (p - q) * (p - q)).sum();
            let mut power = 1.0;
            for c in &coeffs[..truncation] {
                power *= x2;
                exponent += c * power;
            }
            omitted += coeffs[truncation] * power * x2;
        }
        ((-exponent).exp(), omitted)
    });
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let first_omitted_term = pairs.iter().fold(0.0f64, |m, p| m.max(p.1));
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(KernelEstimate {
        estimate: EstimatorResult {
            mean,
            stderr,
            replicates: config.replicates,
            seed: config.seed,
        },
        first_omitted_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::PI;

    #[test]
    fn samples_are_sorted_in_unit_interval() {
        let mut rng = stream(3, 0);
        for n in [1, 2, 17, 200] {
            let s = sample_order_stats(n, &mut rng);
            assert_eq!(s.len(), n);
            for w in s.u().windows(2).chain(s.v().windows(2)) {
                assert!(w[0] <= w[1]);
            }
            assert!(s.u().iter().chain(s.v()).all(|x| (0.0..=1.0).contains(x)));
            assert!((0.0..=1.0).contains(&s.max_gap()));
        }
    }

    #[test]
    fn fixed_seed_reproduces_sample() {
        let a = sample_order_stats(9, &mut stream(42, 5));
        let b = sample_order_stats(9, &mut stream(42, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_constructor_validates() {
        assert!(OrderStatSample::new(vec![0.1], vec![0.2, 0.3]).is_err());
        assert!(OrderStatSample::new(vec![1.1], vec![0.2]).is_err());
        let s = OrderStatSample::new(vec![0.9, 0.1], vec![0.5, 0.2]).unwrap();
        assert_eq!(s.u(), &[0.1, 0.9]);
        assert!((s.max_gap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn series_coefficients() {
        assert_eq!(series_coefficient(1), 0.5);
        assert!((series_coefficient(2) - 1.0 / 24.0).abs() < 1e-17);
        // continuity across the log-space switch
        let direct = |k: usize| {
            let mut b = 1.0f64;
            for i in 1..=k {
                b = b * (k + i) as f64 / i as f64;
            }
            1.0 / (b * (k * k) as f64)
        };
        for k in [25, 26, 27, 40] {
            assert!((series_coefficient(k) / direct(k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn series_at_two_converges_like_inverse_root() {
        // c_k 4^k ~ √(πk)/k², so the tail after K terms is ~ 2√(π/K)
        assert!((arcsine_closed_form(2.0) - PI * PI / 2.0).abs() < 1e-14);
        for k in [50, 200, 800] {
            let deficit = PI * PI / 2.0 - arcsine_series(2.0, k);
            let scaled = deficit * (k as f64).sqrt() / (2.0 * PI.sqrt());
            assert!((scaled - 1.0).abs() < 0.03, "K={k}: {scaled}");
        }
        for x in [0.5, 1.0] {
            assert!((arcsine_series(x, 50) - arcsine_closed_form(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn angle_functional_values() {
        let f = angle_sum_functional(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            f,
            AngleFunctional {
                product: 1.0,
                exponential: 1.0
            }
        );
        let f = angle_sum_functional(&[PI / 2.0]).unwrap();
        assert!(f.product.abs() < 1e-16);
        assert!((f.exponential - (-PI * PI / 8.0).exp()).abs() < 1e-16);
        assert!((f.exponential - 0.2912).abs() < 1e-4);
        assert!(angle_sum_functional(&[-0.1]).is_err());
        assert!(angle_sum_functional(&[3.2]).is_err());
    }

    #[test]
    fn exponential_form_equals_arcsine_closed_form_of_chords() {
        let thetas = [0.3, 1.2, 2.9, 0.0];
        let f = angle_sum_functional(&thetas).unwrap();
        let via_chords: f64 = thetas.iter().map(|t| arcsine_closed_form(2.0 * (t / 2.0).sin())).sum();
        assert!((f.exponential - (-via_chords).exp()).abs() < 1e-15);
    }

    #[test]
    fn product_exponential_gap_is_order_one_over_n() {
        let c = 1.3;
        let gaps: Vec<f64> = [16usize, 64, 256]
            .iter()
            .map(|&n| {
                let thetas = vec![c / (n as f64).sqrt(); n];
                let f = angle_sum_functional(&thetas).unwrap();
                (f.product - f.exponential).abs()
            })
            .collect();
        for w in gaps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
        }
    }

    #[test]
    fn straight_line_estimates_one_exactly() {
        let line = Curve::polyline_through(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        for form in [EstimatorForm::Product, EstimatorForm::Exponential] {
            let r = norm_estimator(&line, 5, form, &McConfig::new(100, 1)).unwrap();
            assert_eq!(r.mean, 1.0);
            assert_eq!(r.stderr, 0.0);
        }
        let oblique = Curve::polyline_through(vec![vec![0.0, 0.0], vec![2.0, 1.0]]).unwrap();
        let r = norm_estimator(&oblique, 5, EstimatorForm::Product, &McConfig::new(100, 1)).unwrap();
        assert!((r.mean - 1.0).abs() < 1e-14);
        let k = kernel_estimator(&line, &line, 4, 8, &McConfig::new(50, 2)).unwrap();
        assert_eq!(k.estimate.mean, 1.0);
        assert_eq!(k.first_omitted_term, 0.0);
    }

    #[test]
    fn summands_stay_in_range_and_are_swap_invariant() {
        let c = Curve::circle_arc(4.0, 1.0).unwrap();
        for r in 0..200 {
            let s = sample_order_stats(6, &mut stream(9, r));
            let p = norm_replicate(&c, &s, EstimatorForm::Product);
            let e = norm_replicate(&c, &s, EstimatorForm::Exponential);
            assert!((-1.0..=1.0).contains(&p));
            assert!(e > 0.0 && e <= 1.0);
            assert_eq!(p, norm_replicate(&c, &s.swapped(), EstimatorForm::Product));
            assert_eq!(e, norm_replicate(&c, &s.swapped(), EstimatorForm::Exponential));
        }
    }

    #[test]
    fn kernel_rejects_dimension_mismatch() {
        let a = Curve::circle_arc(1.0, 1.0).unwrap();
        let b = Curve::axis_path(3, &[(0, 1.0)]).unwrap();
        assert!(matches!(
            kernel_estimator(&a, &b, 2, 4, &McConfig::new(10, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
