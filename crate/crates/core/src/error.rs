use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate matrix (|det| = {0:e})")]
    DegenerateMatrix(f64),
    #[error("matrix has negative determinant; negate it first")]
    NegativeDeterminant,
    #[error("non-finite entries")]
    NonFinite,
    #[error("not hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("points are not collinear (triple product {0:e})")]
    NotCollinear(f64),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("point ({0}, {1}) is not strictly inside the domain")]
    PointOutsideDomain(f64, f64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("zero tangent vector")]
    ZeroVector,
    #[error("region is not contained in the domain")]
    RegionNotContained,
    #[error("domains live in different affine charts")]
    ChartMismatch,
    #[error("word is empty after reduction")]
    EmptyWord,
    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("ping-pong certification failed: {0}")]
    PingPongFailed(String),
    #[error("representation has no splitting annotation")]
    NoSplitting,
    #[error("no line separates the point set from its antipodes")]
    NoSeparatingLine,
    #[error("point lies on the line at infinity of the chart")]
    PointAtInfinity,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("m * Cr exceeds T")]
    InfeasibleM,
    #[error("sequence not converged: last step {0:e}")]
    NotConverged(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
