//! Additive state functionals and the per-particle backward statistics
//! that track their smoothed expectations.

use crate::error::{Result, SmcError};

/// Additive functional h_t(x_{0:t}) = Σ_{s<t} h̃_s(x_s, x_{s+1}), given by
/// its increment terms h̃_s. Terms are deterministic and `dim` is constant
/// in s.
pub trait AdditiveFunctional: Sync {
    /// Dimension d of the statistic.
    fn dim(&self) -> usize;

    /// Writes h̃_s(x, x') into `out` (length `dim`).
    fn term(&self, s: usize, x: &[f64], x_next: &[f64], out: &mut [f64]);

    /// Optional sup-norm bound on ‖h̃_s‖∞, for diagnostics only.
    fn sup_bound(&self, _s: usize) -> Option<f64> {
        None
    }

    /// Evaluates the full functional along one path stored as a flat
    /// `(len × dim)` state sequence.
    fn accumulate_path(&self, states: &[f64], state_dim: usize, out: &mut [f64]) {
        out.fill(0.0);
        let len = states.len() / state_dim;
        let mut term = vec![0.0; self.dim()];
        for s in 0..len.saturating_sub(1) {
            let x = &states[s * state_dim..(s + 1) * state_dim];
            let x_next = &states[(s + 1) * state_dim..(s + 2) * state_dim];
            self.term(s, x, x_next, &mut term);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
    }
}

/// The identically-zero functional; useful when only paths matter.
#[derive(Debug, Clone, Copy)]
pub struct ZeroFunctional {
    pub dim: usize,
}

impl AdditiveFunctional for ZeroFunctional {
    fn dim(&self) -> usize {
        self.dim
    }

    fn term(&self, _s: usize, _x: &[f64], _x_next: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn sup_bound(&self, _s: usize) -> Option<f64> {
        Some(0.0)
    }
}

/// One-lag second moment: h̃_s(x, x') = vec(x x'ᵀ), row-major, so the
/// estimate of Σ_s x_s x_{s+1}ᵀ comes out as a flattened d×d matrix. For
/// scalar states this is the Σ x_s x_{s+1} statistic.
#[derive(Debug, Clone, Copy)]
pub struct OneLagFunctional {
    pub state_dim: usize,
}

impl AdditiveFunctional for OneLagFunctional {
    fn dim(&self) -> usize {
        self.state_dim * self.state_dim
    }

    fn term(&self, _s: usize, x: &[f64], x_next: &[f64], out: &mut [f64]) {
        let d = self.state_dim;
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = x[i] * x_next[j];
            }
        }
    }
}

/// N×d matrix of backward statistics b_s^{1:N} paired with a cloud at the
/// same time index. At s = 0 all rows are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardStats {
    time_index: usize,
    n: usize,
    dim: usize,
    values: Vec<f64>,
}

impl BackwardStats {
    /// All-zero statistics for N particles at time 0.
    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            time_index: 0,
            n,
            dim,
            values: vec![0.0; n * dim],
        }
    }

    pub fn from_rows(time_index: usize, n: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * dim {
            return Err(SmcError::DimensionMismatch {
                what: "backward statistics",
                expected: n * dim,
                got: values.len(),
            });
        }
        Ok(Self {
            time_index,
            n,
            dim,
            values,
        })
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Row mean N⁻¹ Σ_i b^i, the smoothing estimate carried by the cloud.
    pub fn row_mean(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for i in 0..self.n {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= self.n as f64;
        }
        out
    }
}
