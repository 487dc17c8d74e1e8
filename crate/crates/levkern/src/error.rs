use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge ({context}): partial value {partial}, error estimate {abs_error}")]
    QuadratureNonConvergence {
        partial: f64,
        abs_error: f64,
        context: String,
    },

    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    #[error("non-integrable symbol: {0}")]
    NonIntegrableSymbol(String),

    #[error("frequency cutoff failure: {0}")]
    CutoffFailure(String),

    #[error("bracket expansion failed: {0}")]
    UnboundedBracket(String),

    #[error("insufficient points for fit: need {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("non-positive values in fit input")]
    NonPositiveValues,

    #[error("empty window")]
    EmptyWindow,

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
