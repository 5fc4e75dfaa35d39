use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero polynomial has no tropical approximation")]
    ZeroPolynomial,

    #[error("polynomial: {0}")]
    Polynomial(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inputs are not homogeneous of matching degree: {0}")]
    Inhomogeneous(String),

    #[error("R1 violated: denominator polytope has dimension {dim}, expected {expected}")]
    R1Violated { dim: usize, expected: usize },

    #[error("R2 violated: divergent direction y = {witness:?}")]
    R2Violated { witness: Vec<String> },

    #[error("sector {index}: {msg}")]
    Sector { index: usize, msg: String },

    #[error("divergent: r <= 0 on {} subset(s), first {:?}", .subsets.len(), .subsets.first())]
    Divergent { subsets: Vec<u64>, values: Vec<f64> },

    #[error("table for n = {n} needs {bytes} bytes, above the cap of {cap} bytes")]
    MemoryLimit { n: usize, bytes: u128, cap: u128 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("graph not connected")]
    Disconnected,

    #[error("exceptional kinematics: Phi vanishes identically but omega = {omega}")]
    ExceptionalKinematics { omega: f64 },

    #[error("{what} refused: size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error(
        "rejection budget exceeded: {rejected} of {attempted} samples rejected \
         (threshold {threshold:e}); numerically unstable integrand evaluation"
    )]
    RejectionBudget {
        rejected: u64,
        attempted: u64,
        threshold: f64,
    },

    #[error("estimator shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("table file: {0}")]
    TableFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
