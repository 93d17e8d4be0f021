use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole hit: |1 - conj(alpha) z| = {0:e}")]
    PoleHit(f64),
    #[error("point {re}+{im}i is not strictly inside the disk (guard {guard:e})")]
    OutsideDisk { re: f64, im: f64, guard: f64 },
    #[error("point {re}+{im}i is not on the unit circle")]
    NotOnCircle { re: f64, im: f64 },
    #[error("grid size {0} must be a power of two and at least 256")]
    InvalidGrid(usize),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid interpolation sequence: {0}")]
    InvalidAlphas(String),
    #[error("invalid Schur function: {0}")]
    InvalidFunction(String),
    #[error("evaluation point coincides with an atom reflection")]
    AtomOnPath,
    #[error("grid node {0} coincides with an atom")]
    AtomCollision(usize),
    #[error("measure is not Szego on the grid: {clipped} of {total} nodes clipped")]
    NotSzego { clipped: usize, total: usize },
    #[error("finite Blaschke product detected: |gamma_{k}| = {modulus}")]
    FiniteBlaschkeDetected { k: usize, modulus: f64 },
    #[error("derivative information unavailable at step {k}")]
    DerivativeUnavailable { k: usize },
    #[error("Gram matrix rank deficient at degree {k} (condition estimate {condition:e})")]
    RankDeficient { k: usize, condition: f64 },
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("scenario {id} failed at n = {n:?}: {source}")]
    Scenario {
        id: String,
        n: Option<usize>,
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
