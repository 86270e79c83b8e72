//! Probabilistic trace sampling under a random scheduler.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::state::{ProgramState, Trace};
use crate::exec::step::{enabled_transitions, StepError};
use crate::lang::model::ProgramModel;

/// Distribution the scheduler draws from at each step. Every enabled
/// process must be picked with probability > 0, which both variants
/// guarantee (weights are validated strictly positive).
#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerPolicy {
    Uniform,
    /// One weight per process; transitions of process `i` are drawn
    /// proportionally to `weights[i]` renormalized over the enabled set.
    Weighted(Vec<f64>),
}

impl Default for SchedulerPolicy {
    fn default() -> Self {
        SchedulerPolicy::Uniform
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SampleError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("scheduler policy has {got} weights, model has {want} processes")]
    WeightCount { got: usize, want: usize },
    #[error("scheduler weights must be strictly positive")]
    NonPositiveWeight,
}

/// Samples a trace of at most `k` steps starting from the initial
/// state. The trace is shorter only if a deadlock state is reached, in
/// which case it ends there. Reproducible given `(model, k, policy, seed)`.
pub fn sample_trace(
    model: &ProgramModel,
    k: usize,
    policy: &SchedulerPolicy,
    seed: u64,
) -> Result<Trace, SampleError> {
    if let SchedulerPolicy::Weighted(w) = policy {
        if w.len() != model.process_count() {
            return Err(SampleError::WeightCount {
                got: w.len(),
                want: model.process_count(),
            });
        }
        if w.iter().any(|&x| x <= 0.0) {
            return Err(SampleError::NonPositiveWeight);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(k + 1);
    let mut current = ProgramState::initial(model);
    states.push(current.clone());
    for _ in 0..k {
        let enabled = enabled_transitions(model, &current)?;
        if enabled.is_empty() {
            break;
        }
        let pick = match policy {
            SchedulerPolicy::Uniform => rng.random_range(0..enabled.len()),
            SchedulerPolicy::Weighted(weights) => {
                let w: Vec<f64> = enabled.iter().map(|t| weights[t.pid]).collect();
                let total: f64 = w.iter().sum();
                let mut x = rng.random_range(0.0..total);
                let mut idx = 0;
                for (i, wi) in w.iter().enumerate() {
                    if x < *wi {
                        idx = i;
                        break;
                    }
                    x -= wi;
                    idx = i;
                }
                idx
            }
        };
        current = enabled[pick].dst.clone();
        states.push(current.clone());
    }
    Ok(Trace { states, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_model;

    const TOGGLE: &str = "bool t;\nproc flip replicate 2 { t = 1 - t; }";

    #[test]
    fn zero_steps_yields_singleton_initial_trace() {
        let m = parse_model(TOGGLE, "toggle.mpl").unwrap();
        let tr = sample_trace(&m, 0, &SchedulerPolicy::Uniform, 42).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.states[0], ProgramState::initial(&m));
    }

    #[test]
    fn same_seed_gives_identical_trace_bytes() {
        let m = parse_model(crate::exec::tests::PETERSON, "peterson2.mpl").unwrap();
        let a = sample_trace(&m, 40, &SchedulerPolicy::Uniform, 7).unwrap();
        let b = sample_trace(&m, 40, &SchedulerPolicy::Uniform, 7).unwrap();
        assert_eq!(a.dump(), b.dump());
        let c = sample_trace(&m, 40, &SchedulerPolicy::Uniform, 8).unwrap();
        assert_ne!(a.dump(), c.dump());
    }

    #[test]
    fn deadlock_truncates_the_trace() {
        let m = parse_model(TOGGLE, "toggle.mpl").unwrap();
        // Both processes finish after one step each.
        let tr = sample_trace(&m, 10, &SchedulerPolicy::Uniform, 3).unwrap();
        assert_eq!(tr.states.len(), 3);
    }

    #[test]
    fn weighted_policy_validates_weights() {
        let m = parse_model(TOGGLE, "toggle.mpl").unwrap();
        let err = sample_trace(&m, 1, &SchedulerPolicy::Weighted(vec![1.0]), 0).unwrap_err();
        assert!(matches!(err, SampleError::WeightCount { .. }));
        let err =
            sample_trace(&m, 1, &SchedulerPolicy::Weighted(vec![1.0, 0.0]), 0).unwrap_err();
        assert!(matches!(err, SampleError::NonPositiveWeight));
    }
}
