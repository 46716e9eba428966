//! Particle clouds: one generation of the filter.

use std::sync::OnceLock;

use crate::alias::{build_alias, AliasTable};
use crate::error::{Result, SmcError};

/// N particles at one time index with their cached potentials.
///
/// The cloud is an immutable value after construction; the potential of
/// particle `i` is `potential(time_index, particle(i))` for the model that
/// produced it. A cloud whose potentials sum to zero cannot be constructed:
/// silent degeneracy would corrupt every downstream estimator.
#[derive(Debug)]
pub struct ParticleCloud {
    time_index: usize,
    dim: usize,
    states: Vec<f64>,
    potentials: Vec<f64>,
    alias: OnceLock<AliasTable>,
}

impl Clone for ParticleCloud {
    fn clone(&self) -> Self {
        Self {
            time_index: self.time_index,
            dim: self.dim,
            states: self.states.clone(),
            potentials: self.potentials.clone(),
            alias: OnceLock::new(),
        }
    }
}

impl ParticleCloud {
    /// Wraps raw storage, validating the cloud invariants.
    pub fn new(
        time_index: usize,
        dim: usize,
        states: Vec<f64>,
        potentials: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 || states.len() != potentials.len() * dim {
            return Err(SmcError::DimensionMismatch {
                what: "particle cloud states",
                expected: potentials.len() * dim,
                got: states.len(),
            });
        }
        if potentials.is_empty() {
            return Err(SmcError::DimensionMismatch {
                what: "particle cloud size",
                expected: 1,
                got: 0,
            });
        }
        let mut total = 0.0;
        for (index, &g) in potentials.iter().enumerate() {
            if !g.is_finite() {
                return Err(SmcError::NonFiniteWeight { index, value: g });
            }
            if g < 0.0 {
                return Err(SmcError::NegativeWeight { index, value: g });
            }
            total += g;
        }
        if total <= 0.0 {
            return Err(SmcError::AllWeightsZero {
                time: Some(time_index),
            });
        }
        Ok(Self {
            time_index,
            dim,
            states,
            potentials,
            alias: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn particle(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    /// Mean potential N⁻¹ Σ_i g_s(ξ_s^i), the per-step factor of the
    /// unbiased likelihood estimator.
    pub fn mean_potential(&self) -> f64 {
        self.potentials.iter().sum::<f64>() / self.len() as f64
    }

    /// Alias table over the cached potentials, built on first use and
    /// shared by selection and accept-reject proposals.
    pub fn alias(&self) -> &AliasTable {
        self.alias.get_or_init(|| {
            build_alias(&self.potentials).expect("cloud invariant guarantees positive total mass")
        })
    }
}
