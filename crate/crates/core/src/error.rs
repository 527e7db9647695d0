use thiserror::Error;

/// Errors raised by the geometry, estimator, ensemble and quantum modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("distance {value} is saturated (must be < pi)")]
    Saturated { value: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("all points saturated (t_b = {saturation_time:?})")]
    AllSaturated { saturation_time: Option<f64> },

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("data error at row {row}: {reason}")]
    Data { row: usize, reason: String },

    #[error("unsupported map: {0}")]
    UnsupportedMap(String),

    #[error("geometry/map mismatch: {0}")]
    GeometryMismatch(String),

    #[error("domain overflow: {mass:.3e} probability in the outer grid margin")]
    DomainOverflow { mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
