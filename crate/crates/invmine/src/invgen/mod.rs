//! The mining loop: sample traces, keep the visited states as
//! positives, speculate random unvisited states as negatives, relearn
//! the candidate whenever a round contradicts it, and stop once the
//! candidate survives a budgeted streak of challenge rounds.

pub mod report;

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::exec::{sample_trace, SampleError, SchedulerPolicy, Trace};
use crate::exec::state::ProgramState;
use crate::formula::{
    instantiate_atoms, to_text, Atom, AtomError, AtomTemplate, ExampleSets, Formula,
};
use crate::lang::model::{ProgramModel, SlotId, VarLayout};
use crate::learn::{decision_tree_learn, LearnError, LearnStats, LearnerConfig};
use crate::stats::{cp_lower_bound, cp_trials, StatsError};

pub use report::{ConfigEcho, LearnerTotals, Report, RevisionRecord};

/// Which variables the learner may mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alphabet {
    /// All user data variables; program counters excluded.
    Data,
    /// Data variables plus the per-process program counters.
    DataAndPcs,
    /// Explicit names: declared variables (`flag` expands element-wise),
    /// single elements (`flag[1]`), or `_pc` for all counters.
    Named(Vec<String>),
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::Data
    }
}

impl Alphabet {
    pub fn resolve(&self, layout: &VarLayout) -> Result<Vec<SlotId>, InvGenError> {
        let mut slots: Vec<SlotId> = match self {
            Alphabet::Data => layout.data_slot_ids().collect(),
            Alphabet::DataAndPcs => layout.slot_ids().collect(),
            Alphabet::Named(names) => {
                let mut out = Vec::new();
                for name in names {
                    if name == "_pc" {
                        out.extend((0..layout.pc_count()).map(SlotId));
                        continue;
                    }
                    let found = layout.lookup_var(name);
                    if found.is_empty() {
                        return Err(InvGenError::UnknownVariable(name.clone()));
                    }
                    out.extend(found);
                }
                out
            }
        };
        slots.sort_unstable();
        slots.dedup();
        Ok(slots)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvGenConfig {
    /// Steps per sampled trace.
    pub trace_len: usize,
    /// Speculative negatives drawn per round.
    pub negatives_per_round: usize,
    /// Consecutive unrefuted rounds required before stopping.
    pub trace_budget: u64,
    /// Significance for the Clopper-Pearson certificate.
    pub alpha: f64,
    /// Floor the budget at `cp_trials(alpha)`.
    pub certify: bool,
    /// Revise only when a round contradicts the candidate (a visited
    /// state outside it, a refuted negative, or a fresh negative it
    /// fails to exclude). When false, any nonempty `new_negs` forces a
    /// revision, which on models with unreachable states never lets
    /// the survival streak build up.
    pub lazy_revise: bool,
    /// Hard cap on rounds; `None` runs until the budget is met.
    pub max_rounds: Option<u64>,
    pub learner: LearnerConfig,
    pub templates: Vec<AtomTemplate>,
    pub alphabet: Alphabet,
    pub policy: SchedulerPolicy,
    pub seed: u64,
}

impl Default for InvGenConfig {
    fn default() -> Self {
        InvGenConfig {
            trace_len: 50,
            negatives_per_round: 10,
            trace_budget: 120,
            alpha: 0.05,
            certify: false,
            lazy_revise: true,
            max_rounds: None,
            learner: LearnerConfig::default(),
            templates: AtomTemplate::all(),
            alphabet: Alphabet::Data,
            policy: SchedulerPolicy::Uniform,
            seed: 0,
        }
    }
}

/// One revision event.
#[derive(Debug, Clone)]
pub struct Revision {
    pub round: u64,
    pub missed_pos: usize,
    pub bad_negs: usize,
    pub new_negs: usize,
    pub formula: Formula,
    pub wall_time: std::time::Duration,
}

/// Persistent loop state: the visited positives, speculated negatives,
/// current candidate, and survival streak.
#[derive(Debug, Clone)]
pub struct InvGenState {
    pub reached: BTreeSet<ProgramState>,
    pub speculated: BTreeSet<ProgramState>,
    pub phi: Formula,
    pub survival: u64,
    pub rounds: u64,
    pub revisions: Vec<Revision>,
    pub learn_totals: LearnStats,
}

impl InvGenState {
    fn new() -> Self {
        InvGenState {
            reached: BTreeSet::new(),
            speculated: BTreeSet::new(),
            phi: Formula::truth(false),
            survival: 0,
            rounds: 0,
            revisions: Vec::new(),
            learn_totals: LearnStats::default(),
        }
    }
}

/// Snapshot handed to a round observer after the round's bookkeeping
/// (and any revision) completed.
pub struct RoundInfo<'a> {
    pub round: u64,
    pub trace: &'a Trace,
    pub missed_pos: &'a BTreeSet<ProgramState>,
    pub bad_negs: &'a BTreeSet<ProgramState>,
    pub new_negs: &'a BTreeSet<ProgramState>,
    pub revised: bool,
    pub reached_before: usize,
    pub state: &'a InvGenState,
}

#[derive(Debug, Error)]
pub enum InvGenError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("unknown alphabet variable `{0}`")]
    UnknownVariable(String),
    #[error("learning failed in round {round}: {source}")]
    Learner {
        round: u64,
        source: LearnError,
        /// Progress up to the failure, for the partial report.
        partial: Box<Report>,
    },
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The candidate survived `trace_budget` consecutive rounds.
    BudgetSurvived,
    /// The `max_rounds` cap fired first.
    RoundCap,
}

#[derive(Debug)]
pub struct MineOutcome {
    pub formula: Formula,
    pub state: InvGenState,
    pub stop: StopReason,
    pub report: Report,
}

/// Uniform draw from the full variable-domain product; pc components
/// range over the valid statement positions.
fn random_state(layout: &VarLayout, rng: &mut ChaCha8Rng) -> ProgramState {
    let pc_count = layout.pc_count();
    let mut pcs = Vec::with_capacity(pc_count);
    let mut vals = Vec::with_capacity(layout.len() - pc_count);
    for (i, slot) in layout.slots().iter().enumerate() {
        let v = rng.random_range(slot.lo..=slot.hi);
        if i < pc_count {
            pcs.push(v as u16);
        } else {
            vals.push(v);
        }
    }
    ProgramState { pcs, vals }
}

/// Draws up to `count` distinct states from the domain product,
/// rejecting anything already reached. Returns fewer states only when
/// the rejection cap of `100 * count` attempts is hit.
pub fn speculate_negatives(
    model: &ProgramModel,
    reached: &BTreeSet<ProgramState>,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> BTreeSet<ProgramState> {
    let layout = model.layout();
    let mut out = BTreeSet::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < 100 * count {
        attempts += 1;
        let s = random_state(layout, rng);
        if !reached.contains(&s) {
            out.insert(s);
        }
    }
    out
}

/// Projection of a state onto the learning alphabet. Negatives that
/// coincide with some reached state on every alphabet slot are
/// invisible to the learner and are filtered out of its input (the
/// classifier could never separate them from the positives).
fn projection(state: &ProgramState, alphabet: &[SlotId]) -> Vec<i64> {
    alphabet.iter().map(|&slot| state.get(slot)).collect()
}

/// Runs the mining loop. Equivalent to `run_invgen_observed` with a
/// no-op observer.
pub fn run_invgen(model: &ProgramModel, cfg: &InvGenConfig) -> Result<MineOutcome, InvGenError> {
    run_invgen_observed(model, cfg, |_| {})
}

pub fn run_invgen_observed(
    model: &ProgramModel,
    cfg: &InvGenConfig,
    mut observer: impl FnMut(&RoundInfo<'_>),
) -> Result<MineOutcome, InvGenError> {
    let layout = model.layout();
    let alphabet = cfg.alphabet.resolve(layout)?;
    let budget = if cfg.certify {
        cfg.trace_budget.max(cp_trials(cfg.alpha)?)
    } else {
        cfg.trace_budget
    };

    let mut seeds = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = InvGenState::new();
    let stop;

    loop {
        // Fixed three draws per round keep the stream aligned whether
        // or not a revision happens.
        let trace_seed = seeds.next_u64();
        let spec_seed = seeds.next_u64();
        let learn_seed = seeds.next_u64();
        state.rounds += 1;
        let round = state.rounds;

        let trace = sample_trace(model, cfg.trace_len, &cfg.policy, trace_seed)?;
        let trace_states: BTreeSet<ProgramState> = trace.states.iter().cloned().collect();

        let missed_pos: BTreeSet<ProgramState> = trace_states
            .iter()
            .filter(|s| !state.phi.eval(s))
            .cloned()
            .collect();
        let reached_before = state.reached.len();
        state.reached.extend(trace_states.iter().cloned());

        let bad_negs: BTreeSet<ProgramState> = trace_states
            .iter()
            .filter(|s| state.speculated.contains(*s))
            .cloned()
            .collect();
        for s in &bad_negs {
            state.speculated.remove(s);
        }

        let mut spec_rng = ChaCha8Rng::seed_from_u64(spec_seed);
        let new_negs =
            speculate_negatives(model, &state.reached, cfg.negatives_per_round, &mut spec_rng);
        state.speculated.extend(new_negs.iter().cloned());

        debug_assert!(state.reached.intersection(&state.speculated).next().is_none());

        let reached_projections: HashSet<Vec<i64>> = state
            .reached
            .iter()
            .map(|s| projection(s, &alphabet))
            .collect();
        let new_negs_demand_revision = if cfg.lazy_revise {
            // A fresh negative matters only if the candidate admits it
            // and the learner can see it at all (its projection is not
            // shadowed by a reached state).
            new_negs.iter().any(|s| {
                state.phi.eval(s) && !reached_projections.contains(&projection(s, &alphabet))
            })
        } else {
            !new_negs.is_empty()
        };
        let revised = !missed_pos.is_empty() || !bad_negs.is_empty() || new_negs_demand_revision;

        if revised {
            let t0 = Instant::now();
            let positives: Vec<ProgramState> = state.reached.iter().cloned().collect();
            let negatives: Vec<ProgramState> = state
                .speculated
                .iter()
                .filter(|s| !reached_projections.contains(&projection(s, &alphabet)))
                .cloned()
                .collect();
            let atoms: Vec<Atom> =
                instantiate_atoms(layout, &positives, &cfg.templates, &alphabet)?;
            let ex = ExampleSets::new(positives, negatives);
            let mut learn_rng = ChaCha8Rng::seed_from_u64(learn_seed);
            match decision_tree_learn(&ex, &cfg.learner, &atoms, &mut learn_rng) {
                Ok(result) => {
                    state.phi = result.formula;
                    state.learn_totals.absorb(result.stats);
                    state.revisions.push(Revision {
                        round,
                        missed_pos: missed_pos.len(),
                        bad_negs: bad_negs.len(),
                        new_negs: new_negs.len(),
                        formula: state.phi.clone(),
                        wall_time: t0.elapsed(),
                    });
                    state.survival = 0;
                }
                Err(source) => {
                    let partial = build_report(model, cfg, &state, "learner_failure", budget);
                    return Err(InvGenError::Learner {
                        round,
                        source,
                        partial: Box::new(partial),
                    });
                }
            }
        } else {
            state.survival += 1;
        }

        observer(&RoundInfo {
            round,
            trace: &trace,
            missed_pos: &missed_pos,
            bad_negs: &bad_negs,
            new_negs: &new_negs,
            revised,
            reached_before,
            state: &state,
        });

        if state.survival >= budget {
            stop = StopReason::BudgetSurvived;
            break;
        }
        if let Some(cap) = cfg.max_rounds {
            if state.rounds >= cap {
                stop = StopReason::RoundCap;
                break;
            }
        }
    }

    let outcome_label = match stop {
        StopReason::BudgetSurvived => "converged",
        StopReason::RoundCap => "round_cap",
    };
    let mut report = build_report(model, cfg, &state, outcome_label, budget);
    report.tightness_estimate = Some(tightness_estimate(model, &state, cfg.seed));
    Ok(MineOutcome { formula: state.phi.clone(), state, stop, report })
}

/// Fraction of randomly drawn non-reached domain states the candidate
/// still admits; a cheap looseness indicator reported alongside the
/// Clopper-Pearson bound.
fn tightness_estimate(model: &ProgramModel, state: &InvGenState, seed: u64) -> f64 {
    const SAMPLES: usize = 4096;
    let layout = model.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7469676874) ;
    let mut outside = 0usize;
    let mut admitted = 0usize;
    while outside < SAMPLES {
        let s = random_state(layout, &mut rng);
        if state.reached.contains(&s) {
            continue;
        }
        outside += 1;
        if state.phi.eval(&s) {
            admitted += 1;
        }
    }
    admitted as f64 / outside as f64
}

fn build_report(
    model: &ProgramModel,
    cfg: &InvGenConfig,
    state: &InvGenState,
    outcome: &str,
    effective_budget: u64,
) -> Report {
    let layout = model.layout();
    let alphabet_names: Vec<String> = cfg
        .alphabet
        .resolve(layout)
        .map(|slots| slots.iter().map(|&s| layout.slot(s).name.clone()).collect())
        .unwrap_or_default();
    Report {
        model: model.file.clone(),
        seed: cfg.seed,
        outcome: outcome.to_string(),
        config: ConfigEcho {
            trace_len: cfg.trace_len,
            negatives_per_round: cfg.negatives_per_round,
            trace_budget: effective_budget,
            alpha: cfg.alpha,
            certify: cfg.certify,
            lazy_revise: cfg.lazy_revise,
            delta: cfg.learner.delta.to_string(),
            leaf_bound: cfg.learner.leaf_bound,
            max_inv_length: cfg.learner.max_inv_length,
            subsample_size: cfg.learner.subsample_size,
            max_subsample_rounds: cfg.learner.max_subsample_rounds,
            max_tree_depth: cfg.learner.max_tree_depth,
            alphabet: alphabet_names,
        },
        rounds: state.rounds,
        revisions: state
            .revisions
            .iter()
            .map(|r| RevisionRecord {
                round: r.round,
                missed_pos: r.missed_pos,
                bad_negs: r.bad_negs,
                new_negs: r.new_negs,
                formula: to_text(&r.formula, layout),
                wall_secs: r.wall_time.as_secs_f64(),
            })
            .collect(),
        visited_states: state.reached.len(),
        reachable_states: None,
        visited_ratio: None,
        final_invariant: to_text(&state.phi, layout),
        invariant_length: state.phi.len(),
        survival_rounds: state.survival,
        cp_lower_bound: if state.survival >= 1 {
            cp_lower_bound(state.survival, cfg.alpha).ok()
        } else {
            None
        },
        tightness_estimate: None,
        learner_stats: LearnerTotals {
            revisions: state.revisions.len() as u64,
            formulas_enumerated: state.learn_totals.formulas_enumerated,
            signatures_deduped: state.learn_totals.signatures_deduped,
            tree_nodes: state.learn_totals.tree_nodes,
            learn_secs: state.learn_totals.wall_time.as_secs_f64(),
        },
    }
}
