use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid process model: {0}")]
    InvalidModel(String),

    #[error("invalid shift scenario: {0}")]
    InvalidScenario(String),

    #[error("masking requires a nonzero correlation (slope beta is zero)")]
    MaskingWithZeroCorrelation,

    #[error("subgroup of size {0} is too small; at least 2 observations are needed")]
    SubgroupTooSmall(usize),

    #[error("sample mean of the auxiliary variable is zero; ratio estimator is undefined")]
    DivisionByZeroMean,

    #[error("population mean of the auxiliary variable is zero; product estimator is undefined")]
    ZeroPopulationMean,

    #[error("auxiliary variable has zero sample variance; regression slope is undefined")]
    DegenerateDesign,

    #[error("smoothing constant {0} is outside (0, 1]")]
    InvalidLambda(f64),

    #[error("invalid chart specification: {0}")]
    InvalidChart(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("{censored} of {reps} runs hit the run-length cap")]
    ExcessCensoring { censored: u64, reps: u64 },

    #[error("Markov chain system (I - Q) is numerically singular")]
    SingularSystem,

    #[error("invalid number of Markov states {0}; need an odd number >= 51")]
    InvalidStateCount(usize),

    #[error("target in-control ARL {0} cannot be bracketed for L in (0, 10]")]
    NoBracket(f64),

    #[error("profile slope {b0} does not match the process slope {beta}")]
    MismatchedSlope { b0: f64, beta: f64 },

    #[error("paired sample has {y} y-values but {x} x-values")]
    LengthMismatch { y: usize, x: usize },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
