//! Template-free invariant mining for concurrent models.
//!
//! A small Promela-like modeling language is executed under an
//! interleaving scheduler; visited states become positive examples,
//! randomly speculated unvisited states become negatives, and a
//! decision-tree-partitioned enumerative learner fits a Boolean
//! classifier over atomic predicates. Candidates that survive a budget
//! of challenge rounds carry a Clopper-Pearson confidence bound, and a
//! built-in explicit-state checker certifies them on finite instances.
//!
//! The crate is organized along the pipeline:
//!
//! - [`lang`]: lexer, parser, and static checker for `.mpl` sources
//! - [`exec`]: interleaving semantics, trace sampling, reachability
//! - [`formula`]: atoms, formulas, signatures, precision/recall
//! - [`learn`]: enumerative synthesis inside a decision tree
//! - [`invgen`]: the sampling/speculation/revision loop
//! - [`stats`]: Clopper-Pearson trial counts and bounds
//! - [`verify`]: exhaustive soundness and tightness checking
//!
//! Data-parallel inner loops (reachability frontiers, per-atom
//! signature evaluation, domain scans) run on rayon under the default
//! `parallel` feature and fall back to sequential loops without it.

pub mod diag;
pub mod exec;
pub mod formula;
pub mod invgen;
pub mod lang;
pub mod learn;
mod par;
pub mod stats;
pub mod verify;

pub use diag::Diagnostic;
pub use exec::{
    enabled_transitions, reach_fixpoint, reach_k, sample_trace, ProgramState, SchedulerPolicy,
    Trace,
};
pub use formula::{instantiate_atoms, parse_formula, to_text, Atom, ExampleSets, Formula};
pub use invgen::{run_invgen, run_invgen_observed, Alphabet, InvGenConfig, Report};
pub use lang::{parse_model, ProgramModel};
pub use learn::{decision_tree_learn, inv_learn, LearnerConfig};
pub use stats::{cp_lower_bound, cp_trials};
pub use verify::{verify_invariant, Verdict, VerifyOutcome};
