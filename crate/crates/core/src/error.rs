use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constraint matrix has rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("basis condition estimate {estimate:.3e} exceeds threshold; retry with the rational backend")]
    NumericBreakdown { estimate: f64 },
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("operation requires form {expected}, got {found}")]
    WrongForm { expected: String, found: String },
    #[error("{m} constraints exceed the sign-enumeration limit of {limit}")]
    TooManyConstraints { m: usize, limit: usize },
    #[error("optimal solution is degenerate or not unique")]
    DegenerateInput,
    #[error("pattern perturbs more than the objective")]
    PatternNotObjectiveOnly,
    #[error("perturbation pattern is identically zero")]
    ZeroPattern,
    #[error("invalid perturbation pattern: {0}")]
    InvalidPattern(String),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("regularity violated: {0}")]
    RegularityViolation(String),
    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported MPS feature: {0}")]
    UnsupportedFeature(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
