//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A covariance matrix required to be invertible is singular or too
    /// ill-conditioned to trust. `role` names the matrix in domain terms.
    #[error("singular matrix: {role}")]
    SingularMatrix { role: String },

    /// A special function received a non-finite argument.
    #[error("non-finite input to {what}")]
    NonFinite { what: &'static str },

    /// A parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Eve observes nothing correlated with the legitimate channel
    /// (`alpha_a = alpha_b = 0`), so no linear combiner exists.
    #[error("eve has no observable signal (alpha_a = alpha_b = 0)")]
    NoObservableSignal,

    /// The requested quantity is only defined for a different channel model.
    #[error("unsupported channel model: {0}")]
    UnsupportedModel(String),

    /// Doubling the quadrature order moved the result by more than the
    /// requested relative tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// An information quantity came out structurally undefined
    /// (for example the difference of two infinite mutual informations).
    #[error("ill-posed information quantity: {0}")]
    IllPosed(String),

    /// A table correlation model was asked for a lag beyond its length.
    #[error("correlation table has no entry for lag {lag} (length {len})")]
    TableOutOfRange { lag: i64, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
