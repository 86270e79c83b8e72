//! Program states, transitions, and traces.

use std::fmt;

use crate::lang::model::{ProgramModel, SlotId};

/// A total valuation of a model: one location per process plus the
/// flattened user variables in declaration order. States hash and
/// order by that canonical flattening.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProgramState {
    pub pcs: Vec<u16>,
    pub vals: Vec<i64>,
}

impl ProgramState {
    pub fn initial(model: &ProgramModel) -> Self {
        ProgramState {
            pcs: vec![0; model.process_count()],
            vals: model.initial_vals(),
        }
    }

    /// Value of a canonical slot (pc slots first, then user values).
    pub fn get(&self, slot: SlotId) -> i64 {
        if slot.0 < self.pcs.len() {
            self.pcs[slot.0] as i64
        } else {
            self.vals[slot.0 - self.pcs.len()]
        }
    }

    pub fn set(&mut self, slot: SlotId, v: i64) {
        if slot.0 < self.pcs.len() {
            self.pcs[slot.0] = v as u16;
        } else {
            self.vals[slot.0 - self.pcs.len()] = v;
        }
    }

    /// Canonical tab-separated tuple: pc values then user values.
    pub fn tuple_line(&self) -> String {
        let mut parts: Vec<String> = self.pcs.iter().map(|p| p.to_string()).collect();
        parts.extend(self.vals.iter().map(|v| v.to_string()));
        parts.join("\t")
    }
}

impl fmt::Display for ProgramState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, p) in self.pcs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        for v in &self.vals {
            write!(f, ",{v}")?;
        }
        write!(f, ">")
    }
}

/// One small step: process `pid` executed the statement at index
/// `stmt` of its body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub src: ProgramState,
    pub dst: ProgramState,
    pub pid: usize,
    pub stmt: usize,
}

/// A finite sampled execution. `states[0]` is the initial state and
/// consecutive states are related by the transition relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<ProgramState>,
    pub seed: u64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Canonical dump: one state per line, tab-separated tuple.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.states {
            out.push_str(&s.tuple_line());
            out.push('\n');
        }
        out
    }
}
