//! Curve-spec files: flat TOML with a `kind` discriminator, one curve per file.
//!
//! ```toml
//! kind = "circle-arc"
//! curvature = 6.283185307179586
//! length = 1.0
//! ```

use serde::{Deserialize, Serialize};
use sigasym::curves::{Arc, Curve, Orientation};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    CircleArc {
        curvature: f64,
        length: f64,
    },
    /// Consecutive segments along coordinate axes; `axes` defaults to
    /// `0, 1, 2, …` and `dim` to the number of distinct axes needed.
    AxisPath {
        lengths: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    PiecewiseCircular {
        curvature: f64,
        #[serde(default)]
        phase: f64,
        orientations: Vec<Turn>,
        lengths: Vec<f64>,
    },
    /// Without `times` the polyline is parametrized by arc length.
    Polyline {
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        #[serde(default)]
        renormalize: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Ccw,
    Cw,
}

impl CurveSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::validation("bad-curve-spec", format!("{origin}: {}", e.message())))
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("curve-file-unreadable", format!("{path}: {e}")))?;
        Self::parse(&text, path)
    }

    pub fn build(&self) -> Result<Curve, CliError> {
        let curve = match self {
            CurveSpec::CircleArc { curvature, length } => Curve::circle_arc(*curvature, *length),
            CurveSpec::AxisPath { lengths, axes, dim } => {
                let axes: Vec<usize> = axes.clone().unwrap_or_else(|| (0..lengths.len()).collect());
                if axes.len() != lengths.len() {
                    return Err(CliError::validation(
                        "bad-curve-spec",
                        format!("{} axes for {} lengths", axes.len(), lengths.len()),
                    ));
                }
                let dim = dim.unwrap_or_else(|| axes.iter().max().map_or(1, |m| m + 1));
                let segments: Vec<(usize, f64)> = axes.into_iter().zip(lengths.iter().copied()).collect();
                Curve::axis_path(dim, &segments)
            }
            CurveSpec::PiecewiseCircular {
                curvature,
                phase,
                orientations,
                lengths,
            } => {
                if orientations.len() != lengths.len() {
                    return Err(CliError::validation(
                        "bad-curve-spec",
                        format!("{} orientations for {} lengths", orientations.len(), lengths.len()),
                    ));
                }
                let arcs: Vec<Arc> = orientations
                    .iter()
                    .zip(lengths)
                    .map(|(o, &length)| Arc {
                        orientation: match o {
                            Turn::Ccw => Orientation::CounterClockwise,
                            Turn::Cw => Orientation::Clockwise,
                        },
                        length,
                    })
                    .collect();
                Curve::piecewise_circular(*curvature, *phase, &arcs)
            }
            CurveSpec::Polyline {
                vertices,
                times,
                renormalize,
            } => match times {
                Some(t) => Curve::polyline(vertices.clone(), t.clone(), *renormalize),
                None => Curve::polyline_through(vertices.clone()),
            },
        };
        curve.map_err(|e| CliError::validation("bad-curve", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let circle = CurveSpec::parse("kind = \"circle-arc\"\ncurvature = 1.0\nlength = 1.0\n", "t").unwrap();
        assert_eq!(
            circle,
            CurveSpec::CircleArc {
                curvature: 1.0,
                length: 1.0
            }
        );
        let axis = CurveSpec::parse("kind = \"axis-path\"\nlengths = [0.5, 0.5]\n", "t").unwrap();
        assert_eq!(axis.build().unwrap().dim(), 2);
        let pc = CurveSpec::parse(
            "kind = \"piecewise-circular\"\ncurvature = 2.0\norientations = [\"ccw\", \"cw\"]\nlengths = [0.4, 0.6]\n",
            "t",
        )
        .unwrap();
        assert!((pc.build().unwrap().length() - 1.0).abs() < 1e-15);
        let line = CurveSpec::parse("kind = \"polyline\"\nvertices = [[0.0, 0.0], [1.0, 0.0]]\n", "t").unwrap();
        assert_eq!(line.build().unwrap().length(), 1.0);
    }

    #[test]
    fn rejects_unknown_fields_and_kinds() {
        assert!(CurveSpec::parse("kind = \"circle-arc\"\ncurvature = 1.0\nlength = 1.0\nextra = 2\n", "t").is_err());
        assert!(CurveSpec::parse("kind = \"spiral\"\n", "t").is_err());
    }

    #[test]
    fn roundtrips_through_toml() {
        let spec = CurveSpec::Polyline {
            vertices: vec![vec![0.0, 0.0], vec![0.3, 0.4]],
            times: None,
            renormalize: false,
        };
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(CurveSpec::parse(&text, "t").unwrap(), spec);
    }
}
