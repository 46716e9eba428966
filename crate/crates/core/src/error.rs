//! Error type shared by all particle and oracle routines.

use thiserror::Error;

/// Errors surfaced by filtering, smoothing, sampling and oracle code.
///
/// Degenerate weight configurations are reported as errors rather than
/// silently renormalised: a cloud with zero total mass corrupts every
/// estimator downstream of it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmcError {
    /// Every weight handed to a categorical sampler was zero.
    #[error("all weights are zero (particle collapse at time {time:?})")]
    AllWeightsZero { time: Option<usize> },

    /// A weight was negative.
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    /// A weight was NaN or infinite.
    #[error("non-finite weight {value} at index {index}")]
    NonFiniteWeight { index: usize, value: f64 },

    /// The backward-kernel row had zero total mass at the given time.
    #[error("backward kernel row has zero mass at time {time}")]
    ZeroBackwardMass { time: usize },

    /// Accept-reject backward sampling was requested but the model does not
    /// expose a transition-density upper bound.
    #[error("model provides no transition density upper bound; use the exact backward sampler")]
    MissingDensityUpperBound,

    /// Shapes of two paired inputs disagree.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A covariance matrix required by a Gaussian model is not invertible.
    #[error("singular covariance in {what}")]
    SingularCovariance { what: &'static str },

    /// The innovation covariance in a Kalman update is not invertible.
    #[error("singular innovation covariance at time {time}")]
    SingularInnovation { time: usize },

    /// A bound that must be strictly positive was not.
    #[error("bound must be strictly positive, got {value}")]
    NonpositiveBound { value: f64 },

    /// The particle count is at or below the threshold `n_min` required for
    /// the mixing-rate formula to be valid.
    #[error("particle count {n} is at or below the mixing threshold {n_min}")]
    BelowParticleThreshold { n: usize, n_min: usize },

    /// A gradient handed to the optimizer contained NaN or infinities.
    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },

    /// The model family cannot differentiate the requested parameter block.
    #[error("unsupported parameter block: {what}")]
    UnsupportedParameter { what: &'static str },

    /// Configuration rejected before running anything.
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, SmcError>;
