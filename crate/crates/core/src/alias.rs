//! Walker–Vose alias tables for O(1) categorical sampling.
//!
//! Resampling draws ancestor indices from a categorical distribution over
//! particle weights at every step; the alias method gives constant-cost
//! draws after an O(N) setup, which is what keeps multinomial resampling
//! and accept-reject backward sampling linear in the cloud size.

use rand::Rng;

use crate::error::{Result, SmcError};
use crate::rng::StreamRng;

/// Pre-initialised categorical sampler over `N` categories.
///
/// Sampling returns index `i` with probability `weights[i] / Σ weights`
/// exactly, up to the floating-point normalisation of the input row.
#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

/// Builds an alias table from nonnegative weights in O(N).
///
/// At least one weight must be strictly positive and none may be negative
/// or NaN.
pub fn build_alias(weights: &[f64]) -> Result<AliasTable> {
    let n = weights.len();
    let mut total = 0.0;
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(SmcError::NonFiniteWeight { index, value: w });
        }
        if w < 0.0 {
            return Err(SmcError::NegativeWeight { index, value: w });
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(SmcError::AllWeightsZero { time: None });
    }

    // Scale so the average cell mass is 1, then pair undersized cells with
    // oversized donors.
    let scale = n as f64 / total;
    let mut scaled: Vec<f64> = weights.iter().map(|&w| w * scale).collect();
    let mut prob = vec![0.0; n];
    let mut alias = vec![0usize; n];
    let mut small: Vec<usize> = Vec::with_capacity(n);
    let mut large: Vec<usize> = Vec::with_capacity(n);
    for (i, &w) in scaled.iter().enumerate() {
        if w < 1.0 {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        prob[s] = scaled[s];
        alias[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if scaled[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    // Whatever remains is full by construction (rounding may leave either
    // stack nonempty).
    for &i in small.iter().chain(large.iter()) {
        prob[i] = 1.0;
        alias[i] = i;
    }
    Ok(AliasTable { prob, alias })
}

/// Draws one index from the table's categorical distribution.
pub fn alias_draw(table: &AliasTable, rng: &mut StreamRng) -> usize {
    table.draw(rng)
}

impl AliasTable {
    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Cell probability row (diagnostics; sums with the alias row to the
    /// normalised weights).
    pub fn prob_row(&self) -> &[f64] {
        &self.prob
    }

    /// Alias row.
    pub fn alias_row(&self) -> &[usize] {
        &self.alias
    }

    #[inline]
    pub fn draw(&self, rng: &mut StreamRng) -> usize {
        let cell = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[cell] {
            cell
        } else {
            self.alias[cell]
        }
    }
}
