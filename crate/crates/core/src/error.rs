//! Error types shared across the measurement chain.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured data (grids, lengths, file layouts) does not match its contract.
    #[error("format error: {0}")]
    Format(String),

    /// A calibration reference cannot be formed (zero sphere return at some frequency).
    #[error("degenerate calibration reference: {0}")]
    DegenerateReference(String),

    /// A fit was requested on data that cannot identify the parameters.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Fewer samples than the estimator needs.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An iterative fit stopped without meeting its convergence criterion.
    /// Carries the best parameters and log-likelihood reached.
    #[error("fit did not converge after {iterations} iterations (best loglik {loglik})")]
    FitFailure {
        iterations: usize,
        params: Vec<f64>,
        loglik: f64,
    },

    /// Every candidate model failed to fit.
    #[error("no model could be fitted: {0}")]
    NoModel(String),

    /// A pipeline stage failed; wraps the underlying error with the stage name.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
