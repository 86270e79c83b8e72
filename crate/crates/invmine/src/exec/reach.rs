//! Exhaustive bounded reachability. This is the desk-scale oracle the
//! acceptance pipeline uses to certify learned invariants; no
//! partial-order or symmetry reduction is attempted.

use std::collections::HashSet;

use thiserror::Error;

use crate::exec::state::ProgramState;
use crate::exec::step::{enabled_transitions, StepError};
use crate::lang::model::ProgramModel;
use crate::par;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReachError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("state explosion: exceeded the ceiling of {ceiling} states ({reached} reached)")]
    StateExplosion { ceiling: usize, reached: usize },
}

/// Default ceiling on explored states.
pub const DEFAULT_STATE_CEILING: usize = 5_000_000;

fn reach_impl(
    model: &ProgramModel,
    depth: Option<usize>,
    ceiling: usize,
    parallel: bool,
) -> Result<HashSet<ProgramState>, ReachError> {
    let init = ProgramState::initial(model);
    let mut visited: HashSet<ProgramState> = HashSet::new();
    visited.insert(init.clone());
    let mut frontier = vec![init];
    let mut level = 0usize;
    while !frontier.is_empty() {
        if let Some(k) = depth {
            if level >= k {
                break;
            }
        }
        let expand = |s: &ProgramState| -> Result<Vec<ProgramState>, StepError> {
            Ok(enabled_transitions(model, s)?.into_iter().map(|t| t.dst).collect())
        };
        let batches = if parallel {
            par::map_collect(&frontier, expand)
        } else {
            par::map_collect_seq(&frontier, expand)
        };
        let mut next = Vec::new();
        for batch in batches {
            for dst in batch? {
                if visited.insert(dst.clone()) {
                    if visited.len() > ceiling {
                        return Err(ReachError::StateExplosion {
                            ceiling,
                            reached: visited.len(),
                        });
                    }
                    next.push(dst);
                }
            }
        }
        frontier = next;
        level += 1;
    }
    Ok(visited)
}

/// States reachable from the initial state in at most `k` transitions
/// (frontier-by-frontier BFS closure).
pub fn reach_k(
    model: &ProgramModel,
    k: usize,
    ceiling: usize,
) -> Result<HashSet<ProgramState>, ReachError> {
    reach_impl(model, Some(k), ceiling, cfg!(feature = "parallel"))
}

/// Least fixed point of the successor closure: the full reachable set.
pub fn reach_fixpoint(
    model: &ProgramModel,
    ceiling: usize,
) -> Result<HashSet<ProgramState>, ReachError> {
    reach_impl(model, None, ceiling, cfg!(feature = "parallel"))
}

/// Sequential reference path for [`reach_k`].
pub fn reach_k_seq(
    model: &ProgramModel,
    k: usize,
    ceiling: usize,
) -> Result<HashSet<ProgramState>, ReachError> {
    reach_impl(model, Some(k), ceiling, false)
}

/// Sequential reference path for [`reach_fixpoint`].
pub fn reach_fixpoint_seq(
    model: &ProgramModel,
    ceiling: usize,
) -> Result<HashSet<ProgramState>, ReachError> {
    reach_impl(model, None, ceiling, false)
}
