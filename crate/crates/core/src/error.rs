use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density operator: {0}")]
    NotAState(String),

    #[error("map is not trace preserving (first-row deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("Kraus set is not trace preserving (deviation {deviation:.3e})")]
    KrausNotTracePreserving { deviation: f64 },

    #[error("negative eigenvalue {value:.3e} below PSD slack")]
    NegativeEigenvalue { value: f64 },

    #[error("process map at t = {t} is not invertible (condition number {condition:.3e})")]
    NonInvertibleProcess { t: f64, condition: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("time {t} outside the process domain [0, {t_end}]")]
    OutsideDomain { t: f64, t_end: f64 },

    #[error("distance is singular at t = {t}, tau = {tau}")]
    SingularDistance { t: f64, tau: f64 },

    #[error("invalid process sample at t = {t}: {reason}")]
    InvalidProcess { t: f64, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("cannot parse input: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
