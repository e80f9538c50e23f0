//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TroopError>;

#[derive(Debug, Clone, Error)]
pub enum TroopError {
    #[error("invalid transition: {0}")]
    InvalidTransition(String),

    #[error("invalid beam geometry: {0}")]
    InvalidBeam(String),

    #[error("evaluation point coincides with a beam focus")]
    AtBeamFocus,

    #[error("point outside illuminated region (all beam weights zero)")]
    OutsideIlluminatedRegion,

    #[error("invalid light field: {0}")]
    InvalidField(String),

    #[error("invalid rate generator: {0}")]
    InvalidGenerator(String),

    #[error("degenerate steady state: null space has dimension {null_dim}")]
    DegenerateSteadyState { null_dim: usize },

    #[error("populations not normalized (sum = {sum})")]
    UnnormalizedPopulations { sum: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl TroopError {
    /// True when the error indicates bad user input rather than a numerical
    /// breakdown. The CLI maps this to exit code 1 (validation) vs 2 (numerical).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            TroopError::InvalidTransition(_)
                | TroopError::InvalidBeam(_)
                | TroopError::InvalidParameter(_)
                | TroopError::Config(_)
        )
    }
}
