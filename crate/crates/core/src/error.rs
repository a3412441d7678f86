use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The logarithm is undefined: antipodal points on a sphere or a
    /// rotation by (almost) π.
    #[error("points lie on each other's cut locus (distance {distance})")]
    CutLocus { distance: f64 },

    #[error("conjugate point along geodesic of length {length}")]
    Conjugate { length: f64 },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    #[error("parameter {t} outside the curve domain [0, {n}]")]
    Domain { t: f64, n: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("inconsistent variable pack: {0}")]
    Pack(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("Armijo line search failed after {backtracks} backtracks")]
    BacktrackFail { backtracks: usize },

    /// Rendered as `context: inner`, so it is not reported as a source.
    #[error("{context}: {inner}")]
    Context { context: String, inner: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), inner: Box::new(self) }
    }

    /// The innermost error with all context layers stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { inner, .. } => inner.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
