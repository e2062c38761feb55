use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("sphere dimension {0} outside supported range 1..=6")]
    UnsupportedDimension(usize),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no missed point with positive clearance found (best clearance {best_clearance:.3e})")]
    NoMissedPoint { best_clearance: f64 },

    #[error("contraction passes within {distance:.3e} of the missed point")]
    ClearanceViolated { distance: f64 },

    #[error("target value is not regular for this triangulation")]
    NonRegularValue,

    #[error("{wild} of {total} image simplices are degenerate; refinement insufficient")]
    InsufficientRefinement { wild: usize, total: usize },

    #[error("work budget of {limit} simplices exhausted")]
    BudgetExhausted { limit: usize },

    #[error("matrix is rank deficient (smallest singular value bound {bound:.3e})")]
    RankDeficient { bound: f64 },

    #[error("unitarity defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    UnitarityDrift { defect: f64, tolerance: f64 },

    #[error("first column reached -e1 during reduction")]
    ReductionSingular,

    #[error("column degree {degree} is not divisible by {factor}")]
    Divisibility { degree: i64, factor: i64 },

    #[error("orbit is not null-homotopic: {0}")]
    NotNullHomotopic(String),

    #[error("frame degenerate: {0}")]
    FrameDegenerate(String),

    #[error("form restricts to zero at parameter {parameter:?}")]
    NotTransverse { parameter: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("malformed scenario at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
