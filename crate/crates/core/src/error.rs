use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("configuration must contain at least one point")]
    EmptyConfiguration,

    #[error("coordinate {value} is not finite")]
    NonFiniteCoordinate { value: f64 },

    #[error("center coincides with input point {index}")]
    CenterCoincidesWithPoint { index: usize },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("Weiszfeld iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),

    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error("perfect matching needs an even number of points, got {0}")]
    OddCardinality(usize),

    #[error("exact matching supports at most {max} points, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("adaptive quadrature did not reach tolerance {tol:e}")]
    QuadratureNotConverged { tol: f64 },

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point file line {line}: {message}")]
    PointFile { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
