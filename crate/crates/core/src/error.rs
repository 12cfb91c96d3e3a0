use thiserror::Error;

/// Errors raised by the simulation layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The step-halving check did not converge within the refinement limit.
    #[error("{stage}: integration did not converge (step-halving discrepancy {discrepancy:.3e} > {tolerance:.3e} at {steps} steps)")]
    StepSize {
        stage: &'static str,
        steps: usize,
        discrepancy: f64,
        tolerance: f64,
    },

    /// A cutoff that would leave the bath filter without effect.
    #[error("degenerate cutoff: {0}")]
    DegenerateCutoff(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
