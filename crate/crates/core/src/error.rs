use serde::Serialize;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fit failure: design matrix condition number {condition:.3e} exceeds guard; near-degenerate terms {first} and {second}")]
    IllConditioned {
        condition: f64,
        first: String,
        second: String,
    },

    #[error("fit failure: relative residual {residual:.3e} exceeds threshold {threshold:.1e}")]
    FitResidual { residual: f64, threshold: f64 },

    #[error("radius ladder too short: {radii} radii for {terms} model terms (need at least twice as many)")]
    LadderTooShort { radii: usize, terms: usize },

    #[error("non-finite sample at {at:?}")]
    NonFinite { at: Vec<f64> },

    #[error("singular matrix at point {point:?}")]
    Singular { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("order precondition violated: {0}")]
    OrderViolation(String),

    #[error("eigenvalue sum did not converge: tail estimate {tail:.3e} at window {window}")]
    TailNotConverged { tail: f64, window: usize },

    #[error("derivative unavailable: {0}")]
    DerivativeUnavailable(String),

    #[error("missing expansion coefficient for degree {degree}, log power {log_power}")]
    MissingCoefficient { degree: f64, log_power: u32 },

    #[error("finite-difference step underflow at coordinate {coordinate} (x = {x})")]
    StepUnderflow { coordinate: usize, x: f64 },

    #[error("quadrature did not converge: refinement levels differ by {difference:.3e}")]
    QuadratureNonconvergence { difference: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
