use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller violated a precondition (bad mode index, empty circuit, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested heralding outcome has (numerically) zero probability.
    /// Optimizers map this to their dummy objective instead of aborting.
    #[error("heralding outcome has vanishing probability ({probability:.3e})")]
    HeraldImpossible { probability: f64 },

    /// A factorization failed or a probability left its sanity band.
    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// A document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A parsed document or behavior table failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// The truncated number-state basis leaked too much amplitude.
    #[error("truncated basis too small: norm loss {norm_loss:.3e}")]
    Truncation { norm_loss: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
