//! Serializable run report. `Report::from_json(report.to_json())`
//! round-trips exactly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub seed: u64,
    pub outcome: String,
    pub config: ConfigEcho,
    pub rounds: u64,
    pub revisions: Vec<RevisionRecord>,
    pub visited_states: usize,
    pub reachable_states: Option<usize>,
    pub visited_ratio: Option<f64>,
    pub final_invariant: String,
    pub invariant_length: usize,
    pub survival_rounds: u64,
    pub cp_lower_bound: Option<f64>,
    pub tightness_estimate: Option<f64>,
    pub learner_stats: LearnerTotals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub trace_len: usize,
    pub negatives_per_round: usize,
    pub trace_budget: u64,
    pub alpha: f64,
    pub certify: bool,
    pub lazy_revise: bool,
    pub delta: String,
    pub leaf_bound: usize,
    pub max_inv_length: usize,
    pub subsample_size: usize,
    pub max_subsample_rounds: usize,
    pub max_tree_depth: usize,
    pub alphabet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub round: u64,
    pub missed_pos: usize,
    pub bad_negs: usize,
    pub new_negs: usize,
    pub formula: String,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerTotals {
    pub revisions: u64,
    pub formulas_enumerated: u64,
    pub signatures_deduped: u64,
    pub tree_nodes: u64,
    pub learn_secs: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Records the exhaustive oracle's count and the visited ratio.
    pub fn fill_oracle(&mut self, reachable: usize) {
        self.reachable_states = Some(reachable);
        self.visited_ratio = Some(self.visited_states as f64 / reachable as f64);
    }
}
