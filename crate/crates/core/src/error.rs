use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violates the hypothesis of the operation it feeds.
    /// The message names the violated condition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid generator parameter: {0}")]
    Parameter(String),

    #[error("face {face} is degenerate (zero area)")]
    DegenerateFace { face: usize },

    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("vertex {vertex} at distance {distance} is not strictly inside radius {radius}")]
    NotContained {
        vertex: usize,
        distance: f64,
        radius: f64,
    },

    #[error("no face lies outside radius {0}")]
    EmptyRegion(f64),

    #[error("ODE integration failed at t = {0}: step size underflow")]
    Integration(f64),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Rayleigh quotient denominator vanishes")]
    ZeroDenominator,

    #[error("test function must be strictly positive on free vertices (vertex {vertex} has {value})")]
    NonPositive { vertex: usize, value: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
