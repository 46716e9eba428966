//! Bootstrap particle filter: multinomial selection by potential, mutation
//! through the transition kernel, and the unbiased likelihood estimator.

use crate::cloud::ParticleCloud;
use crate::error::{Result, SmcError};
use crate::functional::{AdditiveFunctional, BackwardStats};
use crate::model::StateSpaceModel;
use crate::rng::{Phase, RngStream};

/// Potentials below this switch the likelihood accumulation to log space.
const LINEAR_UNDERFLOW_GUARD: f64 = 1e-300;

/// Draws the initial cloud: N independent samples from η₀ with potentials
/// cached at time 0.
pub fn pf_init<M: StateSpaceModel>(model: &M, n: usize, stream: &RngStream) -> Result<ParticleCloud> {
    assert!(n >= 1, "particle count must be positive");
    let dim = model.state_dim();
    let mut states = vec![0.0; n * dim];
    let mut potentials = vec![0.0; n];
    let init = stream.phase(Phase::Init).time(0);
    for i in 0..n {
        let mut rng = init.particle(i as u32).rng();
        let out = &mut states[i * dim..(i + 1) * dim];
        model.init_sample(&mut rng, out);
        potentials[i] = model.potential(0, out);
    }
    ParticleCloud::new(0, dim, states, potentials)
}

/// One selection–mutation step.
///
/// Ancestor indices are drawn from the categorical distribution over the
/// cloud's potentials via its alias table, then each selected particle is
/// propagated through M_s. Returns the ancestors together with the next
/// cloud (potentials recached at s+1).
pub fn pf_step<M: StateSpaceModel>(
    model: &M,
    cloud: &ParticleCloud,
    stream: &RngStream,
) -> Result<(Vec<usize>, ParticleCloud)> {
    let n = cloud.len();
    let dim = cloud.dim();
    let s = cloud.time_index();
    let alias = cloud.alias();
    let mut ancestors = vec![0usize; n];
    let mut states = vec![0.0; n * dim];
    let mut potentials = vec![0.0; n];
    let step = stream.phase(Phase::Propagate).time(s as u32 + 1);
    for i in 0..n {
        let mut rng = step.particle(i as u32).rng();
        let a = alias.draw(&mut rng);
        ancestors[i] = a;
        let out = &mut states[i * dim..(i + 1) * dim];
        model.transition_sample(s, cloud.particle(a), &mut rng, out);
        potentials[i] = model.potential(s + 1, out);
    }
    let next = ParticleCloud::new(s + 1, dim, states, potentials)?;
    Ok((ancestors, next))
}

/// Poor man's smoother update: statistics follow the ancestor line,
/// b_{s+1}^i = b_s^{A_s^i} + h̃_s(ξ_s^{A_s^i}, ξ_{s+1}^i).
pub fn genealogy_update<F: AdditiveFunctional>(
    prev_stats: &BackwardStats,
    ancestors: &[usize],
    functional: &F,
    prev_cloud: &ParticleCloud,
    next_cloud: &ParticleCloud,
) -> Result<BackwardStats> {
    let n = next_cloud.len();
    let d = functional.dim();
    if prev_stats.len() != prev_cloud.len() {
        return Err(SmcError::DimensionMismatch {
            what: "genealogy statistics rows",
            expected: prev_cloud.len(),
            got: prev_stats.len(),
        });
    }
    if prev_stats.dim() != d {
        return Err(SmcError::DimensionMismatch {
            what: "genealogy statistics dim",
            expected: d,
            got: prev_stats.dim(),
        });
    }
    if ancestors.len() != n {
        return Err(SmcError::DimensionMismatch {
            what: "ancestor indices",
            expected: n,
            got: ancestors.len(),
        });
    }
    let s = prev_cloud.time_index();
    let mut values = vec![0.0; n * d];
    let mut term = vec![0.0; d];
    for i in 0..n {
        let a = ancestors[i];
        functional.term(s, prev_cloud.particle(a), next_cloud.particle(i), &mut term);
        let row = &mut values[i * d..(i + 1) * d];
        for ((r, &b), &t) in row.iter_mut().zip(prev_stats.row(a)).zip(&term) {
            *r = b + t;
        }
    }
    BackwardStats::from_rows(s + 1, n, d, values)
}

/// Outcome of the particle likelihood estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikEstimate {
    /// Σ_{s=0}^{T} log(N⁻¹ Σ_i g_s(ξ_s^i)); exponentiating gives an
    /// unbiased estimate of the likelihood.
    pub log_likelihood: f64,
    /// True when a generation collapsed to zero total mass, in which case
    /// `log_likelihood` is -∞.
    pub degenerate: bool,
}

/// Runs a fresh bootstrap filter over horizon T and accumulates the
/// log-likelihood estimate from the mean potentials of generations 0..=T.
pub fn pf_loglik<M: StateSpaceModel>(
    model: &M,
    horizon: usize,
    n: usize,
    stream: &RngStream,
) -> Result<LogLikEstimate> {
    let mut cloud = match pf_init(model, n, stream) {
        Ok(c) => c,
        Err(SmcError::AllWeightsZero { .. }) => {
            return Ok(LogLikEstimate {
                log_likelihood: f64::NEG_INFINITY,
                degenerate: true,
            })
        }
        Err(e) => return Err(e),
    };
    let mut loglik = step_log_mean_potential(model, &cloud);
    for _ in 0..horizon {
        match pf_step(model, &cloud, stream) {
            Ok((_, next)) => cloud = next,
            Err(SmcError::AllWeightsZero { .. }) => {
                return Ok(LogLikEstimate {
                    log_likelihood: f64::NEG_INFINITY,
                    degenerate: true,
                })
            }
            Err(e) => return Err(e),
        }
        loglik += step_log_mean_potential(model, &cloud);
    }
    Ok(LogLikEstimate {
        log_likelihood: loglik,
        degenerate: false,
    })
}

/// log of the mean potential of one generation. Falls back to a log-space
/// log-sum-exp when any cached potential is small enough to have lost
/// precision in linear space.
fn step_log_mean_potential<M: StateSpaceModel>(model: &M, cloud: &ParticleCloud) -> f64 {
    let gs = cloud.potentials();
    if gs.iter().any(|&g| g > 0.0 && g < LINEAR_UNDERFLOW_GUARD) {
        let s = cloud.time_index();
        let logs: Vec<f64> = (0..cloud.len())
            .map(|i| model.log_potential(s, cloud.particle(i)))
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
        max + sum.ln() - (cloud.len() as f64).ln()
    } else {
        cloud.mean_potential().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_gof;
    use crate::testing::{ConstantModel, TableModel};

    fn stream(seed: u64) -> RngStream {
        RngStream::from_seed(seed)
    }

    #[test]
    fn deterministic_init_collapses_to_point() {
        // η₀ = δ_{x0} with x0 = (2, -1).
        let model = ConstantModel::new(vec![2.0, -1.0]);
        let cloud = pf_init(&model, 8, &stream(1)).unwrap();
        for i in 0..8 {
            assert_eq!(cloud.particle(i), &[2.0, -1.0]);
        }
    }

    #[test]
    fn single_particle_init() {
        let model = ConstantModel::new(vec![0.5]);
        let cloud = pf_init(&model, 1, &stream(2)).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.time_index(), 0);
    }

    #[test]
    fn single_particle_ancestor_is_zero() {
        let model = ConstantModel::new(vec![0.0]);
        let cloud = pf_init(&model, 1, &stream(3)).unwrap();
        let (ancestors, next) = pf_step(&model, &cloud, &stream(3)).unwrap();
        assert_eq!(ancestors, vec![0]);
        assert_eq!(next.time_index(), 1);
    }

    #[test]
    fn zero_weight_particles_never_selected() {
        // Potentials (1, 0, 0): every ancestor must be 0.
        let model = TableModel::three_state(vec![1.0, 0.0, 0.0]);
        let cloud = model.cloud_at(0, &[0, 1, 2]);
        for rep in 0..50 {
            let (ancestors, _) = pf_step(&model, &cloud, &stream(rep)).unwrap();
            assert!(ancestors.iter().all(|&a| a == 0), "{ancestors:?}");
        }
    }

    #[test]
    fn constant_potential_gives_uniform_ancestors() {
        let model = TableModel::three_state(vec![2.0, 2.0, 2.0]);
        let cloud = model.cloud_at(0, &[0, 1, 2]);
        let mut counts = [0usize; 3];
        // 10^5 ancestor draws across replicate streams.
        for rep in 0..250 {
            let (ancestors, _) = pf_step(&model, &cloud, &stream(500 + rep)).unwrap();
            for a in ancestors {
                counts[a] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        assert_eq!(total, 250 * 3);
        let p = chi_square_gof(&counts, &[1.0 / 3.0; 3]);
        assert!(p > 0.001, "p={p}, counts={counts:?}");
    }

    #[test]
    fn genealogy_zero_functional_stays_zero() {
        let model = TableModel::three_state(vec![1.0, 1.0, 1.0]);
        let prev = model.cloud_at(0, &[0, 1, 2]);
        let next = model.cloud_at(1, &[1, 2, 0]);
        let zero = crate::functional::ZeroFunctional { dim: 2 };
        let stats = genealogy_update(
            &BackwardStats::zeros(3, 2),
            &[1, 0, 1],
            &zero,
            &prev,
            &next,
        )
        .unwrap();
        assert!(stats.row_mean().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn genealogy_single_particle_accumulates() {
        let model = ConstantModel::new(vec![3.0]);
        let c0 = pf_init(&model, 1, &stream(4)).unwrap();
        let (a, c1) = pf_step(&model, &c0, &stream(4)).unwrap();
        let f = crate::functional::OneLagFunctional { state_dim: 1 };
        let stats =
            genealogy_update(&BackwardStats::zeros(1, 1), &a, &f, &c0, &c1).unwrap();
        // b_1 = b_0 + h̃_0(3, 3) = 9.
        assert_eq!(stats.row(0), &[9.0]);
    }

    #[test]
    fn genealogy_three_particle_hand_case() {
        // Scalar states: prev = (1, 2, 3), next = (4, 5, 6), ancestors (1, 0, 1),
        // h̃(x, x') = x·x', prev stats rows (10, 20, 30).
        // Row 0: 20 + 2*4 = 28; row 1: 10 + 1*5 = 15; row 2: 20 + 2*6 = 32.
        let model = TableModel::three_state(vec![1.0, 1.0, 1.0]);
        let prev = ParticleCloud::new(0, 1, vec![1.0, 2.0, 3.0], vec![1.0; 3]).unwrap();
        let next = ParticleCloud::new(1, 1, vec![4.0, 5.0, 6.0], vec![1.0; 3]).unwrap();
        let _ = model;
        let f = crate::functional::OneLagFunctional { state_dim: 1 };
        let prev_stats = BackwardStats::from_rows(0, 3, 1, vec![10.0, 20.0, 30.0]).unwrap();
        let stats = genealogy_update(&prev_stats, &[1, 0, 1], &f, &prev, &next).unwrap();
        assert_eq!(stats.row(0), &[28.0]);
        assert_eq!(stats.row(1), &[15.0]);
        assert_eq!(stats.row(2), &[32.0]);
    }

    #[test]
    fn loglik_constant_potential_is_exact() {
        // g ≡ c: estimate is exactly (T+1)·log c with zero variance.
        let c = 0.7;
        let model = ConstantModel::new(vec![0.0]).with_potential(c);
        let t = 13;
        let est = pf_loglik(&model, t, 5, &stream(6)).unwrap();
        assert!(!est.degenerate);
        let expected = (t as f64 + 1.0) * c.ln();
        assert!((est.log_likelihood - expected).abs() < 1e-12);
    }

    #[test]
    fn loglik_single_particle_is_product_of_potentials() {
        // Time-varying potential on a deterministic chain.
        let model = ConstantModel::new(vec![0.0]).with_time_potentials(vec![0.5, 0.25, 2.0]);
        let est = pf_loglik(&model, 2, 1, &stream(7)).unwrap();
        let expected = 0.5f64.ln() + 0.25f64.ln() + 2.0f64.ln();
        assert!((est.log_likelihood - expected).abs() < 1e-12);
    }

    #[test]
    fn loglik_underflow_guard_matches_log_space() {
        // Potentials far below the linear-space guard still produce the
        // correct log value through the log-potential path.
        let model = ConstantModel::new(vec![0.0]).with_log_potential(-800.0);
        let est = pf_loglik(&model, 1, 4, &stream(8)).unwrap();
        assert!(!est.degenerate);
        assert!((est.log_likelihood - 2.0 * -800.0).abs() < 1e-9);
    }

    #[test]
    fn loglik_collapse_flags_degenerate() {
        let model = ConstantModel::new(vec![0.0]).with_potential(0.0);
        let est = pf_loglik(&model, 3, 4, &stream(9)).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.log_likelihood, f64::NEG_INFINITY);
    }

    #[test]
    fn trajectories_reproduce_bit_identically() {
        let model = TableModel::three_state(vec![1.0, 2.0, 3.0]);
        let run = |seed| {
            let c0 = pf_init(&model, 16, &stream(seed)).unwrap();
            let (a, c1) = pf_step(&model, &c0, &stream(seed)).unwrap();
            (
                c0.potentials().to_vec(),
                a,
                c1.particle(3).to_vec(),
                c1.potentials().to_vec(),
            )
        };
        assert_eq!(run(42), run(42));
    }
}
