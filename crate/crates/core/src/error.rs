use thiserror::Error;

/// Errors raised by curve, tensor, transport and limit computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {t} outside the curve domain [0, {length}]")]
    OutOfDomain { t: f64, length: f64 },

    #[error("derivative of order {order} is not available for {kind} curves")]
    UnsupportedDerivative { order: usize, kind: &'static str },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("sample size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("curvature {curvature:e} vanishes at parameter {at}; the distribution ODE is not integrable")]
    NonIntegrable { at: f64, curvature: f64 },

    #[error("invalid multinomial spec: {0}")]
    InvalidSpec(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
