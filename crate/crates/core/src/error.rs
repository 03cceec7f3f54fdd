use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine could not reach its accuracy contract.
    #[error("accuracy error: {what} (achieved {achieved:.3e}, required {required:.3e})")]
    Accuracy { what: String, achieved: f64, required: f64 },

    /// Input data violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A propagated state left the physical set.
    #[error("numerical instability at step {step}: {detail}")]
    Instability { step: usize, detail: String },

    /// The eigenbasis is too ill-conditioned for a spectral propagator.
    #[error("ill-conditioned eigenbasis (condition number {condition:.3e}); use the time-stepping solver instead")]
    IllConditioned { condition: f64 },

    /// A heuristic estimator found nothing usable in the data.
    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
