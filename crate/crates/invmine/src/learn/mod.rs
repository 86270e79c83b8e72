//! Classifier learning: bottom-up enumerative synthesis over a
//! sub-sample with signature deduplication, wrapped in a decision tree
//! that splits oversized example sets on the best-precision atom.

mod enumerate;
mod tree;

pub use enumerate::{
    atom_signatures, atom_signatures_seq, dedup_by_signature, enumerate_formulas, inv_learn,
    SignatureDeduper,
};
pub use tree::decision_tree_learn;

use std::time::Duration;

use num_rational::Ratio;
use thiserror::Error;

use crate::formula::{Atom, Formula};

/// Knobs for one learning invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    /// Precision threshold; candidates must score strictly above it.
    pub delta: Ratio<u64>,
    /// Largest |P| + |N| handled by direct enumeration; bigger sets
    /// are partitioned by the decision tree.
    pub leaf_bound: usize,
    /// Cap on candidate formula AST size.
    pub max_inv_length: usize,
    /// Examples drawn per set per sub-sampling round.
    pub subsample_size: usize,
    /// Sub-sample growth retries before giving up.
    pub max_subsample_rounds: usize,
    /// Recursion cap for the decision tree.
    pub max_tree_depth: usize,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            delta: Ratio::new(19, 20),
            leaf_bound: 200,
            max_inv_length: 9,
            subsample_size: 50,
            max_subsample_rounds: 5,
            max_tree_depth: 12,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        let ok = self.delta > Ratio::new(0, 1)
            && self.delta <= Ratio::new(1, 1)
            && self.leaf_bound > 0
            && self.max_inv_length > 0
            && self.subsample_size > 0
            && self.max_subsample_rounds > 0
            && self.max_tree_depth > 0;
        if ok {
            Ok(())
        } else {
            Err(LearnError::BadConfig)
        }
    }
}

/// Parses a threshold like `0.95`, `19/20`, or `1` into an exact
/// rational, so comparisons against it never drift.
pub fn parse_ratio(s: &str) -> Option<Ratio<u64>> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: u64 = num.trim().parse().ok()?;
        let d: u64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = 10u64.pow(frac.len() as u32);
        let frac: u64 = frac.parse().ok()?;
        return Some(Ratio::new(int.checked_mul(scale)?.checked_add(frac)?, scale));
    }
    s.parse::<u64>().ok().map(|n| Ratio::new(n, 1))
}

/// Counters from one learning invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LearnStats {
    pub atoms_enumerated: usize,
    pub formulas_enumerated: u64,
    pub signatures_deduped: u64,
    pub wall_time: Duration,
    pub tree_nodes: u64,
    /// Split atoms chosen by the decision tree, root first.
    pub splits: Vec<Atom>,
}

impl LearnStats {
    pub fn absorb(&mut self, other: LearnStats) {
        self.atoms_enumerated = self.atoms_enumerated.max(other.atoms_enumerated);
        self.formulas_enumerated += other.formulas_enumerated;
        self.signatures_deduped += other.signatures_deduped;
        self.wall_time += other.wall_time;
        self.tree_nodes += other.tree_nodes;
        self.splits.extend(other.splits);
    }
}

/// A learned candidate. The formula has recall 1 on the full positive
/// set it was learned from and precision above delta.
#[derive(Debug, Clone)]
pub struct LearnResult {
    pub formula: Formula,
    pub stats: LearnStats,
}

#[derive(Debug, Clone, Error)]
pub enum LearnError {
    #[error("learner configuration out of range")]
    BadConfig,
    #[error("learning requires at least one positive example")]
    EmptyPositives,
    #[error("no candidate within length {max_len} separates the examples")]
    Exhausted {
        max_len: usize,
        best: Option<Box<Formula>>,
        stats: LearnStats,
    },
    #[error("no separating candidate after {rounds} sub-sampling rounds")]
    RoundsExhausted {
        rounds: usize,
        best: Option<Box<Formula>>,
        stats: LearnStats,
    },
    #[error("decision tree exceeded the depth cap of {0}")]
    DepthExceeded(usize),
    #[error("no atom distinguishes any two examples at a tree node")]
    NoSplit,
    #[error("internal contract violation: learned formula misses the recall or precision bound")]
    ContractViolation,
}

impl LearnError {
    /// Best candidate found before failing, when one exists.
    pub fn best_formula(&self) -> Option<&Formula> {
        match self {
            LearnError::Exhausted { best, .. } | LearnError::RoundsExhausted { best, .. } => {
                best.as_deref()
            }
            _ => None,
        }
    }

    pub fn stats(&self) -> Option<&LearnStats> {
        match self {
            LearnError::Exhausted { stats, .. } | LearnError::RoundsExhausted { stats, .. } => {
                Some(stats)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests;
