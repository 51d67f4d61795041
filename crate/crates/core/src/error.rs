use thiserror::Error;

/// Errors raised by the kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a rational function that is identically zero")]
    DivisionByZeroFunction,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("top-degree section is identically zero")]
    ZeroTopSection,
    #[error("operation requires a coordinate (tangent/cotangent) frame")]
    NotChartFrame,
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("3-form is not closed: dH = {0}")]
    NotClosed(String),
    #[error("pseudo-metric is singular")]
    SingularMetric,
    #[error("not a Lie bialgebroid: {0}")]
    NotBialgebroid(String),
    #[error("frame sections are linearly dependent")]
    DependentFrame,
    #[error("invalid Lie algebroid: {0}")]
    InvalidAlgebroid(String),
    #[error("normalization <Omega, V> = {0}, expected 1")]
    BadNormalization(String),
    #[error("Mukai pairing requires even chart dimension")]
    OddDimension,
    #[error("spinor is not pure: {0}")]
    NotPure(String),
    #[error("Mukai pairing <u, conj(u)> vanishes identically")]
    DegeneratePairing,
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("d_H has components outside N_(k-1) + N_(k+1): {0}")]
    LeakageOutsideAdjacent(String),
    #[error("eigenbundle has rank {found}, expected {expected}")]
    RankDeficient { found: usize, expected: usize },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
