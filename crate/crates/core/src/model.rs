//! State-space model abstraction.
//!
//! A model is the triple (η₀, M_s, g_s): an initial distribution, Markov
//! transition kernels with densities m_s with respect to a reference
//! measure (Lebesgue for continuous states, counting measure for discrete
//! ones), and potential functions g_s weighting each state by the
//! likelihood of the observation recorded at time s.

use crate::rng::StreamRng;

/// Callable interface of a fully dominated state-space model, evaluated
/// against one fixed observation record.
///
/// All methods must be pure given the generator state; implementations are
/// shared across threads.
pub trait StateSpaceModel: Sync {
    /// Dimension of the state vectors.
    fn state_dim(&self) -> usize;

    /// Draws from η₀ into `out` (length `state_dim`).
    fn init_sample(&self, rng: &mut StreamRng, out: &mut [f64]);

    /// Draws from M_s(x, ·) into `out`.
    fn transition_sample(&self, s: usize, x: &[f64], rng: &mut StreamRng, out: &mut [f64]);

    /// Transition density m_s(x, x') with respect to the module's reference
    /// measure. Nonnegative.
    fn transition_density(&self, s: usize, x: &[f64], x_next: &[f64]) -> f64;

    /// Uniform upper bound σ̄_s with m_s ≤ σ̄_s everywhere, when one is
    /// available. Required by the accept-reject and hybrid backward
    /// samplers.
    fn transition_density_upper(&self, _s: usize) -> Option<f64> {
        None
    }

    /// Potential g_s(x): likelihood of the time-s observation at state x.
    /// Nonnegative.
    fn potential(&self, s: usize, x: &[f64]) -> f64;

    /// log g_s(x). The default goes through linear space; models whose
    /// potentials can underflow should override with the analytic form.
    fn log_potential(&self, s: usize, x: &[f64]) -> f64 {
        self.potential(s, x).ln()
    }
}
