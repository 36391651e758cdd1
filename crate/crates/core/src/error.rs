use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis span must be positive, got {0}")]
    NonPositiveSpan(f64),
    #[error("axis needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("axes do not match: {0}")]
    AxisMismatch(String),
    #[error("inconsistent units: {0}")]
    InconsistentUnits(String),
    #[error("unit mismatch: {0}")]
    UnitMismatch(String),
    #[error("edge energy fraction {edge_fraction:.3e} exceeds the aliasing threshold {threshold:.1e}")]
    AliasingRisk { edge_fraction: f64, threshold: f64 },
    #[error("dense representation needs {required} bytes, budget is {budget}")]
    BudgetExceeded { required: usize, budget: usize },
    #[error("expected a Kirkwood-Rihaczek distribution")]
    NotKirkwood,
    #[error("expected a Wigner distribution")]
    NotWigner,
    #[error("operation requires a separable representation")]
    NotSeparable,
    #[error("{coord} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        coord: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("local oscillator outside the four-window regime: {0}")]
    RegimeViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
