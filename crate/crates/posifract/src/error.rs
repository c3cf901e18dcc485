//! Crate-wide error type.

use thiserror::Error;

use crate::rb_core::ValidationReport;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two values that must share a shape (length, grid, domain) do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Two sequences carry different exponents.
    #[error("exponent mismatch: left has p = {left}, right has p = {right}")]
    ExponentMismatch { left: String, right: String },

    /// A scalar or structural parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A point lies outside the domain of the function or map.
    #[error("domain error: {0}")]
    Domain(String),

    /// A composite object (config, spec member) is inconsistent.
    #[error("invalid configuration: {0}")]
    Configuration(String),

    /// An operator produced a negative sample; the input spec left the
    /// positive cone and is invalid.
    #[error("positivity violation: output sample {value:e} at x = {x} leaves the positive cone")]
    PositivityViolation { x: f64, value: f64 },

    /// The spec's contraction factor is not below one.
    #[error("operator is not contractive: factor = {factor}")]
    NotContractive { factor: f64 },

    /// The fixed-point iteration did not reach the tolerance.
    #[error("no convergence after {iterations} iterations; last step {last_step:e}")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        history: Vec<f64>,
    },

    /// The spec failed one or more validation checks.
    #[error("spec failed validation: {}", .0.failures())]
    SpecInvalid(Box<ValidationReport>),
}

pub type Result<T> = std::result::Result<T, Error>;
