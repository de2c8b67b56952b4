use thiserror::Error;

use crate::pointer::Axis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ket is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("ket has a non-finite amplitude")]
    NonFinite,

    #[error("pre- and post-selected states are orthogonal (|<post|pre>| = {overlap:e})")]
    OrthogonalSelection { overlap: f64 },

    #[error("no history connects the pre- and post-selected states through this measurement")]
    NoValidHistory,

    #[error("outcome {eigenvalue} is impossible for this state (projected norm {norm:e})")]
    ImpossibleOutcome { eigenvalue: f64, norm: f64 },

    #[error("observable has no eigenvalue {0}")]
    UnknownEigenvalue(f64),

    #[error("observable list is empty")]
    EmptyObservableList,

    #[error("invalid spectral observable: {0}")]
    InvalidObservable(#[from] SpectralViolation),

    #[error("pointer axis {0} is already coupled")]
    DuplicateAxis(Axis),

    #[error("invalid pointer: {0}")]
    InvalidPointer(&'static str),

    #[error("point has {got} coordinates, mixture has {expected} axes")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("post-selection has vanishing probability ({probability:e})")]
    NullPostSelection { probability: f64 },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("insufficient data: {d1_count} post-selected shots, need at least 2")]
    InsufficientData { d1_count: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}

/// First invariant a [`SpectralObservable`](crate::qstate::SpectralObservable) fails.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralViolation {
    #[error("observable has no branches")]
    Empty,

    #[error("eigenvalue {0} is not finite")]
    NonFiniteEigenvalue(f64),

    #[error("duplicate eigenvalue {0}")]
    DuplicateEigenvalue(f64),

    #[error("projector for eigenvalue {eigenvalue} is not idempotent (residual {residual:e})")]
    NotIdempotent { eigenvalue: f64, residual: f64 },

    #[error("projector for eigenvalue {eigenvalue} is not hermitian (residual {residual:e})")]
    NotHermitian { eigenvalue: f64, residual: f64 },

    #[error("projectors for eigenvalues {first} and {second} are not orthogonal (residual {residual:e})")]
    NotOrthogonal {
        first: f64,
        second: f64,
        residual: f64,
    },

    #[error("projectors do not sum to identity (residual {residual:e})")]
    Incomplete { residual: f64 },
}
