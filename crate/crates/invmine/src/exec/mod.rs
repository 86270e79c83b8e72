//! Interleaving execution semantics: enabled-transition enumeration,
//! probabilistic trace sampling, and exhaustive bounded reachability.

pub mod reach;
pub mod sample;
pub mod state;
pub mod step;

pub use reach::{
    reach_fixpoint, reach_fixpoint_seq, reach_k, reach_k_seq, ReachError, DEFAULT_STATE_CEILING,
};
pub use sample::{sample_trace, SampleError, SchedulerPolicy};
pub use state::{ProgramState, Trace, Transition};
pub use step::{enabled_transitions, StepError};
