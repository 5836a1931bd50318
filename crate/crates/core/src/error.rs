//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by the force calculations and the data-reduction pipeline.
#[derive(Debug, Error)]
pub enum CasimirError {
    /// A conversion was requested between units that are not a supported pair.
    #[error("unsupported unit conversion: {from} -> {to}")]
    UnsupportedUnitPair { from: &'static str, to: &'static str },

    /// An input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    /// A series summation hit its term cap before the stopping rule fired.
    #[error("series did not converge within {terms} terms (alpha = {alpha:.3e})")]
    SeriesNotConverged { terms: usize, alpha: f64 },

    /// A separation is at or below the deepest roughness excursion.
    #[error("contact regime: separation {separation_nm} nm <= 2A = {limit_nm} nm")]
    ContactRegime { separation_nm: f64, limit_nm: f64 },

    /// An expansion was evaluated outside its stated validity range.
    #[error("out of validity range: {0}")]
    OutOfValidity(String),

    /// The least-squares problem has no unique solution.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A data file could not be parsed. Row and column are 1-based.
    #[error("parse error at row {row}{}: {message}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        row: usize,
        col: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CasimirError>;
