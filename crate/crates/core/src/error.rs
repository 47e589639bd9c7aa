//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, EpfError>;

/// Coarse error class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum EpfError {
    #[error("calendar day {date} is missing from the input")]
    MissingDay { date: String },

    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("non-finite value at row {line}")]
    NonFiniteValue { line: usize },

    #[error("duplicate observation for {date} hour {hour}")]
    DuplicateHour { date: String, hour: usize },

    #[error("day {date} cannot be repaired: {reason}")]
    UnrepairableDay { date: String, reason: String },

    #[error("forecast day {day} outside [{first}, {last}]")]
    OutOfRange { day: usize, first: usize, last: usize },

    #[error("invalid window plan: {0}")]
    InvalidPlan(String),

    #[error("calibration window has zero median absolute deviation")]
    DegenerateWindow,

    #[error("design is numerically rank deficient")]
    RankDeficient,

    #[error("series of length {len} too short (need more than {needed})")]
    ShortSeries { len: usize, needed: usize },

    #[error("block Toeplitz autocovariance matrix is singular at order {order}")]
    SingularGamma { order: usize },

    #[error("coordinate descent did not converge at lambda={lambda} after {sweeps} sweeps")]
    NoConvergence { lambda: f64, sweeps: usize },

    #[error("window of {days} days too short: {reason}")]
    ShortWindow { days: usize, reason: String },

    #[error("history does not contain the lags required for forecasting")]
    MissingHistory,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty forecast matrix")]
    EmptyMatrix,

    #[error("error measure must be positive, got {value} for {model}")]
    NonPositiveError { model: String, value: f64 },

    #[error("not enough observations: {got} (need at least {needed})")]
    InsufficientData { got: usize, needed: usize },

    #[error("loss differential has zero variance")]
    DegenerateDifferential,

    #[error("model {0} is not a lasso model")]
    NotALassoModel(String),

    #[error("unknown model id '{0}'")]
    UnknownModel(String),

    #[error("missing forecasts: {0}")]
    MissingForecasts(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl EpfError {
    pub fn class(&self) -> ErrorClass {
        use EpfError::*;
        match self {
            UnknownModel(_) | InvalidArgument(_) | InvalidPlan(_) => ErrorClass::Usage,
            DegenerateWindow
            | RankDeficient
            | ShortSeries { .. }
            | SingularGamma { .. }
            | NoConvergence { .. }
            | DegenerateDifferential => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }
}
