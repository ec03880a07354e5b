//! Unit-speed curves: circle arcs, orthogonal axis paths, piecewise-circular
//! curves with constant curvature magnitude, and polylines.
//!
//! Every curve is stored in its arc-length parametrization on `[0, l]`.
//! Polylines carry no curvature, so anything that needs `|γ''|` rejects
//! them.

use crate::error::{Error, Result};

/// Relative slack accepted on the parameter domain and on segment speeds.
const DOMAIN_SLACK: f64 = 1e-12;
const SPEED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    CircleArc,
    AxisPath,
    PiecewiseCircular,
    Polyline,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::CircleArc => "circle-arc",
            CurveKind::AxisPath => "axis-path",
            CurveKind::PiecewiseCircular => "piecewise-circular",
            CurveKind::Polyline => "polyline",
        }
    }
}

/// Orientation of one arc of a piecewise-circular curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

/// One arc of a piecewise-circular curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub orientation: Orientation,
    pub length: f64,
}

#[derive(Debug, Clone)]
enum Shape {
    CircleArc {
        curvature: f64,
    },
    Axis {
        axes: Vec<usize>,
        /// Arc-length parameter at the start of each segment, plus `l`.
        breaks: Vec<f64>,
    },
    PiecewiseCircular {
        curvature: f64,
        signs: Vec<f64>,
        breaks: Vec<f64>,
        start_angles: Vec<f64>,
        start_points: Vec<[f64; 2]>,
    },
    Polyline {
        vertices: Vec<Vec<f64>>,
        times: Vec<f64>,
    },
}

/// A unit-speed curve in `R^d`. Immutable once built.
#[derive(Debug, Clone)]
pub struct Curve {
    dim: usize,
    length: f64,
    shape: Shape,
}

impl Curve {
    /// Planar arc `t ↦ (cos κt, sin κt)/κ` for `t ∈ [0, l]`.
    pub fn circle_arc(curvature: f64, length: f64) -> Result<Self> {
        if !(curvature.is_finite() && curvature > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "circle curvature must be positive, got {curvature}"
            )));
        }
        check_length(length)?;
        Ok(Self {
            dim: 2,
            length,
            shape: Shape::CircleArc { curvature },
        })
    }

    /// Concatenation of straight segments along coordinate axes:
    /// `segments[i] = (axis, length)`.
    pub fn axis_path(dim: usize, segments: &[(usize, f64)]) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidCurve("axis path needs a segment".into()));
        }
        let mut breaks = vec![0.0];
        let mut axes = Vec::with_capacity(segments.len());
        for &(axis, len) in segments {
            if axis >= dim {
                return Err(Error::InvalidCurve(format!(
                    "axis {axis} out of range for dimension {dim}"
                )));
            }
            check_length(len)?;
            axes.push(axis);
            breaks.push(breaks.last().unwrap() + len);
        }
        Ok(Self {
            dim,
            length: *breaks.last().unwrap(),
            shape: Shape::Axis { axes, breaks },
        })
    }

    /// Planar C¹ concatenation of circle arcs of common curvature magnitude
    /// `curvature`; `phase` is the initial tangent angle.
    pub fn piecewise_circular(curvature: f64, phase: f64, arcs: &[Arc]) -> Result<Self> {
        if !(curvature.is_finite() && curvature > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "arc curvature must be positive, got {curvature}"
            )));
        }
        if arcs.is_empty() {
            return Err(Error::InvalidCurve("piecewise-circular curve needs an arc".into()));
        }
        let mut breaks = vec![0.0];
        let mut signs = Vec::with_capacity(arcs.len());
        let mut start_angles = vec![phase];
        let mut start_points = vec![[0.0, 0.0]];
        for (i, arc) in arcs.iter().enumerate() {
            check_length(arc.length)?;
            let sign = arc.orientation.sign();
            signs.push(sign);
            breaks.push(breaks[i] + arc.length);
            let theta0 = start_angles[i];
            let theta1 = theta0 + sign * curvature * arc.length;
            let p0 = start_points[i];
            start_points.push([
                p0[0] + sign * (theta1.sin() - theta0.sin()) / curvature,
                p0[1] - sign * (theta1.cos() - theta0.cos()) / curvature,
            ]);
            start_angles.push(theta1);
        }
        Ok(Self {
            dim: 2,
            length: *breaks.last().unwrap(),
            shape: Shape::PiecewiseCircular {
                curvature,
                signs,
                breaks,
                start_angles,
                start_points,
            },
        })
    }

    /// Polyline through `vertices` at `times`.
    ///
    /// Segment speeds must equal 1 (within 1e-9) unless `renormalize` is set,
    /// in which case `times` is ignored and replaced by cumulative chord
    /// length. Times are shifted so the curve starts at parameter 0.
    pub fn polyline(vertices: Vec<Vec<f64>>, times: Vec<f64>, renormalize: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("polyline needs at least two vertices".into()));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(Error::InvalidCurve("polyline vertices must be non-empty".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.len(),
            });
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCurve("non-finite vertex coordinate".into()));
        }
        let chords: Vec<f64> = vertices.windows(2).map(|w| distance(&w[0], &w[1])).collect();
        let times = if renormalize {
            if chords.contains(&0.0) {
                return Err(Error::InvalidCurve("repeated vertex in polyline".into()));
            }
            let mut t = vec![0.0];
            for c in &chords {
                t.push(t.last().unwrap() + c);
            }
            t
        } else {
            if times.len() != vertices.len() {
                return Err(Error::SizeMismatch {
                    left: vertices.len(),
                    right: times.len(),
                });
            }
            let t0 = times[0];
            let shifted: Vec<f64> = times.iter().map(|t| t - t0).collect();
            for (k, w) in shifted.windows(2).enumerate() {
                let dt = w[1] - w[0];
                if !(dt > 0.0) {
                    return Err(Error::InvalidCurve(format!(
                        "timestamps must be strictly increasing (segment {k})"
                    )));
                }
                let speed = chords[k] / dt;
                if (speed - 1.0).abs() > SPEED_TOL {
                    return Err(Error::InvalidCurve(format!(
                        "segment {k} has speed {speed}, expected 1 (set renormalize to rescale)"
                    )));
                }
            }
            shifted
        };
        Ok(Self {
            dim,
            length: *times.last().unwrap(),
            shape: Shape::Polyline { vertices, times },
        })
    }

    /// Unit-speed polyline through `vertices`, parametrized by arc length.
    pub fn polyline_through(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::polyline(vertices, Vec::new(), true)
    }

    pub fn kind(&self) -> CurveKind {
        match self.shape {
            Shape::CircleArc { .. } => CurveKind::CircleArc,
            Shape::Axis { .. } => CurveKind::AxisPath,
            Shape::PiecewiseCircular { .. } => CurveKind::PiecewiseCircular,
            Shape::Polyline { .. } => CurveKind::Polyline,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Position (`order = 0`), unit tangent (`1`) or second derivative (`2`).
    pub fn evaluate(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        let t = self.clamp_param(t)?;
        match order {
            0 => Ok(self.position(t)),
            1 => Ok(self.tangent(t)),
            2 => self.second_derivative(t),
            _ => Err(Error::UnsupportedDerivative {
                order,
                kind: self.kind().name(),
            }),
        }
    }

    /// `|γ''(t)|`.
    pub fn curvature_at(&self, t: f64) -> Result<f64> {
        self.clamp_param(t)?;
        match &self.shape {
            Shape::CircleArc { curvature } | Shape::PiecewiseCircular { curvature, .. } => Ok(*curvature),
            _ => Err(Error::UnsupportedDerivative {
                order: 2,
                kind: self.kind().name(),
            }),
        }
    }

    /// Lipschitz constant of `t ↦ |γ''_t|⁻¹` when known analytically.
    pub fn declared_inverse_curvature_lipschitz(&self) -> Option<f64> {
        match self.shape {
            Shape::CircleArc { .. } | Shape::PiecewiseCircular { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Vertices of a piecewise-linear curve (polyline or axis path).
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match &self.shape {
            Shape::Polyline { vertices, .. } => Some(vertices.clone()),
            Shape::Axis { breaks, .. } => Some(breaks.iter().map(|&t| self.position(t)).collect()),
            _ => None,
        }
    }

    /// Number of linear pieces for piecewise-linear curves.
    pub fn segment_count(&self) -> Option<usize> {
        match &self.shape {
            Shape::Polyline { vertices, .. } => Some(vertices.len() - 1),
            Shape::Axis { axes, .. } => Some(axes.len()),
            _ => None,
        }
    }

    /// The curve traversed backwards.
    pub fn reversed(&self) -> Result<Self> {
        match self.vertices() {
            Some(mut v) => {
                v.reverse();
                Self::polyline_through(v)
            }
            None => Err(Error::InvalidCurve(
                "only piecewise-linear curves can be reversed".into(),
            )),
        }
    }

    fn clamp_param(&self, t: f64) -> Result<f64> {
        let slack = DOMAIN_SLACK * self.length.max(1.0);
        if !(t >= -slack && t <= self.length + slack) {
            return Err(Error::OutOfDomain { t, length: self.length });
        }
        Ok(t.clamp(0.0, self.length))
    }

    fn position(&self, t: f64) -> Vec<f64> {
        match &self.shape {
            Shape::CircleArc { curvature } => {
                let a = curvature * t;
                vec![a.cos() / curvature, a.sin() / curvature]
            }
            Shape::Axis { axes, breaks } => {
                let mut p = vec![0.0; self.dim];
                for (i, &axis) in axes.iter().enumerate() {
                    p[axis] += (t.min(breaks[i + 1]) - breaks[i]).max(0.0);
                }
                p
            }
            Shape::PiecewiseCircular {
                curvature,
                signs,
                breaks,
                start_angles,
                start_points,
            } => {
                let i = piece_index(breaks, t);
                let theta0 = start_angles[i];
                let theta = theta0 + signs[i] * curvature * (t - breaks[i]);
                let p0 = start_points[i];
                vec![
                    p0[0] + signs[i] * (theta.sin() - theta0.sin()) / curvature,
                    p0[1] - signs[i] * (theta.cos() - theta0.cos()) / curvature,
                ]
            }
            Shape::Polyline { vertices, times } => {
                let i = piece_index(times, t);
                let s = (t - times[i]) / (times[i + 1] - times[i]);
                vertices[i]
                    .iter()
                    .zip(&vertices[i + 1])
                    .map(|(a, b)| a + s * (b - a))
                    .collect()
            }
        }
    }

    fn tangent(&self, t: f64) -> Vec<f64> {
        match &self.shape {
            Shape::CircleArc { curvature } => {
                let a = curvature * t;
                vec![-a.sin(), a.cos()]
            }
            Shape::Axis { axes, breaks } => {
                let mut e = vec![0.0; self.dim];
                e[axes[piece_index(breaks, t)]] = 1.0;
                e
            }
            Shape::PiecewiseCircular {
                curvature,
                signs,
                breaks,
                start_angles,
                ..
            } => {
                let i = piece_index(breaks, t);
                let theta = start_angles[i] + signs[i] * curvature * (t - breaks[i]);
                vec![theta.cos(), theta.sin()]
            }
            Shape::Polyline { vertices, times } => {
                let i = piece_index(times, t);
                let dt = times[i + 1] - times[i];
                vertices[i]
                    .iter()
                    .zip(&vertices[i + 1])
                    .map(|(a, b)| (b - a) / dt)
                    .collect()
            }
        }
    }

    fn second_derivative(&self, t: f64) -> Result<Vec<f64>> {
        match &self.shape {
            Shape::CircleArc { curvature } => {
                let a = curvature * t;
                Ok(vec![-curvature * a.cos(), -curvature * a.sin()])
            }
            Shape::PiecewiseCircular {
                curvature,
                signs,
                breaks,
                start_angles,
                ..
            } => {
                let i = piece_index(breaks, t);
                let theta = start_angles[i] + signs[i] * curvature * (t - breaks[i]);
                let k = signs[i] * curvature;
                Ok(vec![-k * theta.sin(), k * theta.cos()])
            }
            _ => Err(Error::UnsupportedDerivative {
                order: 2,
                kind: self.kind().name(),
            }),
        }
    }
}

/// Index of the piece containing `t`; pieces are right-open except the last.
fn piece_index(breaks: &[f64], t: f64) -> usize {
    let pieces = breaks.len() - 1;
    breaks.partition_point(|&b| b <= t).saturating_sub(1).min(pieces - 1)
}

fn check_length(len: f64) -> Result<()> {
    if len.is_finite() && len > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCurve(format!("lengths must be positive, got {len}")))
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Chord polyline through `segments + 1` equally spaced arc-length points.
///
/// The returned polyline is reparametrized by its own arc length, so its
/// length is the sum of chords. A polyline already having `segments` pieces
/// is returned unchanged.
pub fn sample_polyline(curve: &Curve, segments: usize) -> Result<Curve> {
    let segments = segments.max(1);
    if curve.kind() == CurveKind::Polyline && curve.segment_count() == Some(segments) {
        return Ok(curve.clone());
    }
    let l = curve.length();
    let vertices = (0..=segments)
        .map(|j| {
            let t = if j == segments {
                l
            } else {
                l * j as f64 / segments as f64
            };
            curve.evaluate(t, 0)
        })
        .collect::<Result<Vec<_>>>()?;
    Curve::polyline_through(vertices)
}

/// Squared curvature on the grid `t_j = j·l/n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    /// `Γ_j = |γ''(t_j)|²`; index 0 is the start of the curve.
    values: Vec<f64>,
    sup_curvature: f64,
    lipschitz: f64,
}

impl CurvatureProfile {
    /// Builds a profile from raw `Γ_0..=Γ_n`; `M` is taken as `max √Γ_j`.
    pub fn from_values(values: Vec<f64>, lipschitz: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("profile needs at least two grid points".into()));
        }
        if values.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Domain("squared curvature must be finite and ≥ 0".into()));
        }
        let sup_curvature = values.iter().fold(0.0f64, |m, g| m.max(g.sqrt()));
        Ok(Self {
            values,
            sup_curvature,
            lipschitz,
        })
    }

    /// Constant profile `Γ_j = gamma` on a grid of size `n`.
    pub fn constant(gamma: f64, n: usize) -> Result<Self> {
        Self::from_values(vec![gamma; n + 1], 0.0)
    }

    /// Grid size `n` (there are `n + 1` values).
    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Γ_j` for `j` in `0..=n`.
    pub fn gamma(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// `M = sup |γ''|`.
    pub fn sup_curvature(&self) -> f64 {
        self.sup_curvature
    }

    /// `L`, Lipschitz constant of `t ↦ |γ''_t|⁻¹`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

pub fn curvature_profile(curve: &Curve, n: usize) -> Result<CurvatureProfile> {
    let n = n.max(1);
    let l = curve.length();
    let values = (0..=n)
        .map(|j| {
            let k = curve.curvature_at(l * j as f64 / n as f64)?;
            Ok(k * k)
        })
        .collect::<Result<Vec<_>>>()?;
    let lipschitz = match curve.declared_inverse_curvature_lipschitz() {
        Some(l) => l,
        None => estimate_inverse_curvature_lipschitz(curve, 10_000)?,
    };
    let mut profile = CurvatureProfile::from_values(values, lipschitz)?;
    if let Shape::CircleArc { curvature } | Shape::PiecewiseCircular { curvature, .. } = curve.shape {
        profile.sup_curvature = curvature;
    }
    Ok(profile)
}

/// Central-difference estimate of the Lipschitz constant of `t ↦ |γ''_t|⁻¹`
/// on `grid` interior points. Advisory only.
pub fn estimate_inverse_curvature_lipschitz(curve: &Curve, grid: usize) -> Result<f64> {
    let grid = grid.max(2);
    let l = curve.length();
    let h = l / grid as f64;
    let mut best = 0.0f64;
    for j in 1..grid {
        let t = j as f64 * h;
        let g_plus = 1.0 / curve.curvature_at(t + h)?;
        let g_minus = 1.0 / curve.curvature_at(t - h)?;
        best = best.max(((g_plus - g_minus) / (2.0 * h)).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn circle_tangent_is_unit_at_start() {
        let c = Curve::circle_arc(1.0, 1.0).unwrap();
        let t = c.evaluate(0.0, 1).unwrap();
        assert!((norm(&t) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_second_derivative_has_curvature_norm() {
        let c = Curve::circle_arc(2.0 * PI, 1.0).unwrap();
        for &t in &[0.0, 0.13, 0.5, 1.0] {
            let a = c.evaluate(t, 2).unwrap();
            assert!((norm(&a) - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_path_tangent_on_second_segment() {
        let c = Curve::axis_path(2, &[(0, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(c.evaluate(0.75, 1).unwrap(), vec![0.0, 1.0]);
        assert_eq!(c.evaluate(0.75, 0).unwrap(), vec![0.5, 0.25]);
    }

    #[test]
    fn out_of_domain_and_unsupported() {
        let c = Curve::circle_arc(1.0, 1.0).unwrap();
        assert!(matches!(c.evaluate(1.5, 0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(c.evaluate(-0.1, 1), Err(Error::OutOfDomain { .. })));
        let p = Curve::polyline_through(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(p.evaluate(0.5, 2), Err(Error::UnsupportedDerivative { .. })));
        assert!(matches!(
            curvature_profile(&p, 4),
            Err(Error::UnsupportedDerivative { .. })
        ));
    }

    #[test]
    fn zero_curvature_is_rejected() {
        assert!(Curve::circle_arc(0.0, 1.0).is_err());
        assert!(Curve::piecewise_circular(0.0, 0.0, &[]).is_err());
    }

    #[test]
    fn polyline_speed_contract() {
        let v = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        assert!(Curve::polyline(v.clone(), vec![0.0, 2.0], false).is_err());
        let ok = Curve::polyline(v.clone(), vec![1.0, 6.0], false).unwrap();
        assert_eq!(ok.length(), 5.0);
        let re = Curve::polyline(v, vec![0.0, 2.0], true).unwrap();
        assert_eq!(re.length(), 5.0);
        assert!(Curve::polyline(vec![vec![0.0], vec![1.0], vec![2.0]], vec![0.0, 1.0, 1.0], false).is_err());
    }

    #[test]
    fn single_segment_sample_is_chord() {
        let c = Curve::circle_arc(1.0, 1.0).unwrap();
        let p = sample_polyline(&c, 1).unwrap();
        let v = p.vertices().unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], c.evaluate(0.0, 0).unwrap());
        assert_eq!(v[1], c.evaluate(1.0, 0).unwrap());
    }

    #[test]
    fn sampled_vertices_lie_on_circle() {
        let c = Curve::circle_arc(2.0 * PI, 1.0).unwrap();
        let v = sample_polyline(&c, 4).unwrap().vertices().unwrap();
        assert_eq!(v.len(), 5);
        for p in v {
            assert!((norm(&p) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn polyline_resample_is_idempotent() {
        let p = Curve::polyline_through(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
        let q = sample_polyline(&p, 2).unwrap();
        assert_eq!(p.vertices(), q.vertices());
    }

    #[test]
    fn chord_length_converges_quadratically() {
        let c = Curve::circle_arc(1.0, 1.0).unwrap();
        let errs: Vec<f64> = [4, 8, 16, 32, 64]
            .iter()
            .map(|&m| 1.0 - sample_polyline(&c, m).unwrap().length())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn profiles_of_constant_curvature_curves() {
        let c = Curve::circle_arc(2.0 * PI, 1.0).unwrap();
        let p = curvature_profile(&c, 10).unwrap();
        assert_eq!(p.grid(), 10);
        assert!(p.values().iter().all(|&g| g == 4.0 * PI * PI));
        assert_eq!(p.lipschitz(), 0.0);

        let arcs = [
            Arc {
                orientation: Orientation::CounterClockwise,
                length: 0.3,
            },
            Arc {
                orientation: Orientation::Clockwise,
                length: 0.5,
            },
            Arc {
                orientation: Orientation::CounterClockwise,
                length: 0.2,
            },
        ];
        let pc = Curve::piecewise_circular(5.0, 0.0, &arcs).unwrap();
        let p = curvature_profile(&pc, 25).unwrap();
        assert!(p.values().iter().all(|&g| (g - 25.0).abs() < 1e-12));
        assert!(p.sup_curvature() >= p.values().iter().fold(0.0f64, |m, g| m.max(g.sqrt())));
    }

    #[test]
    fn piecewise_circular_is_c1_and_integrates_tangent() {
        let arcs = [
            Arc {
                orientation: Orientation::CounterClockwise,
                length: 0.4,
            },
            Arc {
                orientation: Orientation::Clockwise,
                length: 0.6,
            },
        ];
        let c = Curve::piecewise_circular(3.0, 0.7, &arcs).unwrap();
        let eps = 1e-9;
        let left = c.evaluate(0.4 - eps, 1).unwrap();
        let right = c.evaluate(0.4 + eps, 1).unwrap();
        assert!(norm(&[left[0] - right[0], left[1] - right[1]]) < 1e-7);
        let p_left = c.evaluate(0.4 - eps, 0).unwrap();
        let p_right = c.evaluate(0.4 + eps, 0).unwrap();
        assert!(norm(&[p_left[0] - p_right[0], p_left[1] - p_right[1]]) < 1e-8);
        // finite difference of position matches the tangent
        for &t in &[0.1, 0.55, 0.9] {
            let h = 1e-6;
            let a = c.evaluate(t - h, 0).unwrap();
            let b = c.evaluate(t + h, 0).unwrap();
            let tan = c.evaluate(t, 1).unwrap();
            for k in 0..2 {
                assert!(((b[k] - a[k]) / (2.0 * h) - tan[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn lipschitz_estimate_vanishes_for_constant_curvature() {
        let c = Curve::circle_arc(3.0, 1.0).unwrap();
        assert!(estimate_inverse_curvature_lipschitz(&c, 1000).unwrap() < 1e-12);
    }
}
