//! Small numerical kernels shared across modules: a fixed-tree summation,
//! log-factorials, composite Simpson quadrature and monotone cubic Hermite
//! interpolation.

/// Block size below which [`pairwise_sum`] adds sequentially.
const PAIRWISE_LEAF: usize = 8;

/// Sums `values` along a fixed binary tree.
///
/// The tree depends only on `values.len()`, so the result is identical no
/// matter how the inputs were produced (serially or in parallel).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error (sample sd / sqrt(len)) with fixed-tree sums.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Table of `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Error-free transformation `a + b = s + e` with `s = fl(a + b)`.
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Unevaluated sum `hi + lo` carrying roughly twice the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Compensated {
    pub hi: f64,
    pub lo: f64,
}

impl Compensated {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let hi = a * b;
        Self {
            hi,
            lo: a.mul_add(b, -hi),
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Compensated {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (hi, lo) = two_sum(s, e + self.lo + other.lo);
        Self { hi, lo }
    }
}

impl std::ops::Neg for Compensated {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `ln k!` for `k = 0..=n`, accumulated without rounding drift so that
/// differences of large entries stay accurate.
pub fn ln_factorials_compensated(n: usize) -> Vec<Compensated> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = Compensated::default();
    table.push(acc);
    for k in 1..=n {
        acc = acc + Compensated::new((k as f64).ln());
        table.push(acc);
    }
    table
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    let table = ln_factorials(n);
    table[n] - table[k] - table[n - k]
}

/// Composite Simpson rule on `[a, b]` with `points` nodes (rounded up to odd).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let mut points = points.max(3);
    if points.is_multiple_of(2) {
        points += 1;
    }
    let intervals = points - 1;
    let h = (b - a) / intervals as f64;
    let terms: Vec<f64> = (0..points)
        .map(|i| {
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * f(a + i as f64 * h)
        })
        .collect();
    pairwise_sum(&terms) * h / 3.0
}

/// Cubic Hermite interpolant through increasing knots with given slopes.
///
/// Slopes are limited with the Fritsch–Carlson condition so the interpolant
/// stays monotone whenever the data are.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, mut slopes: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert_eq!(xs.len(), slopes.len());
        assert!(xs.len() >= 2, "need at least two knots");
        for k in 0..xs.len() - 1 {
            let secant = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
            if secant == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let alpha = slopes[k] / secant;
            let beta = slopes[k + 1] / secant;
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[k] = tau * alpha * secant;
                slopes[k + 1] = tau * beta * secant;
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    /// Evaluates the interpolant; arguments outside the knot range are
    /// clamped to the end values.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[last] {
            return self.ys[last];
        }
        let k = match self.xs.partition_point(|&knot| knot <= x) {
            0 => 0,
            i => (i - 1).min(last - 1),
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}
