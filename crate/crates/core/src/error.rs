use thiserror::Error;

/// Errors raised by the solver, the norm machinery and the estimate checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("magnetic field recovery needs sigma > 2 (got sigma = {sigma})")]
    MagneticRecoveryUnavailable { sigma: f64 },

    #[error("time step {dt} violates the CFL limit; admissible dt <= {admissible}")]
    StepRejected { dt: f64, admissible: f64 },

    #[error("non-finite values encountered at t = {t}")]
    NumericalBlowup { t: f64 },

    #[error("monotonicity lost at t = {t}: (1+y)^sigma w = {value} < {floor} at (x, y) = ({x}, {y})")]
    MonotonicityLost {
        t: f64,
        x: f64,
        y: f64,
        value: f64,
        floor: f64,
    },

    #[error("unsupported Hardy exponent {0}")]
    UnsupportedExponent(f64),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("a-priori bound expired: blow-up time {blowup_time}")]
    BoundExpired { blowup_time: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
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
