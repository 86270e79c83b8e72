//! Soundness and tightness checking of an invariant against the
//! exhaustive reachability oracle.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec::state::ProgramState;
use crate::exec::{reach_fixpoint, ReachError};
use crate::formula::Formula;
use crate::lang::model::ProgramModel;
use crate::par;

const WITNESS_LIMIT: usize = 10;

/// How the satisfying-set excess was measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tightness {
    /// Every domain state was enumerated.
    Exhaustive { satisfying_outside: u64, domain: u64 },
    /// The domain was too large; uniform sampling instead.
    Sampled { satisfying_outside: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sound,
    /// Reachable states violating the formula (at most ten, canonical
    /// order) and the total violation count.
    Unsound {
        witnesses: Vec<ProgramState>,
        violations: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub verdict: Verdict,
    pub reachable_states: usize,
    pub tightness: Tightness,
}

/// Mixed-radix decoder from a linear index to a domain state.
struct DomainIndexer {
    radices: Vec<u64>,
    los: Vec<i64>,
    pc_count: usize,
}

impl DomainIndexer {
    fn new(model: &ProgramModel) -> Self {
        let layout = model.layout();
        DomainIndexer {
            radices: layout.slots().iter().map(|s| s.domain_size()).collect(),
            los: layout.slots().iter().map(|s| s.lo).collect(),
            pc_count: layout.pc_count(),
        }
    }

    fn total(&self) -> BigUint {
        self.radices.iter().fold(BigUint::from(1u32), |acc, &r| acc * BigUint::from(r))
    }

    fn decode(&self, mut index: u64) -> ProgramState {
        let mut pcs = Vec::with_capacity(self.pc_count);
        let mut vals = Vec::with_capacity(self.radices.len() - self.pc_count);
        for (k, &radix) in self.radices.iter().enumerate() {
            let digit = (index % radix) as i64 + self.los[k];
            index /= radix;
            if k < self.pc_count {
                pcs.push(digit as u16);
            } else {
                vals.push(digit);
            }
        }
        ProgramState { pcs, vals }
    }
}

fn count_outside(
    model: &ProgramModel,
    formula: &Formula,
    reach: &HashSet<ProgramState>,
    domain: u64,
    parallel: bool,
) -> u64 {
    let indexer = DomainIndexer::new(model);
    const CHUNK: u64 = 1 << 14;
    let chunks = domain.div_ceil(CHUNK);
    let count_chunk = |c: u64| -> u64 {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(domain);
        let mut n = 0u64;
        for i in lo..hi {
            let s = indexer.decode(i);
            if formula.eval(&s) && !reach.contains(&s) {
                n += 1;
            }
        }
        n
    };
    let counts = if parallel {
        par::map_range(0..chunks, count_chunk)
    } else {
        par::map_range_seq(0..chunks, count_chunk)
    };
    counts.into_iter().sum()
}

/// Exhaustive count of domain states satisfying `formula` but outside
/// `reach`. Used when the domain product fits the tightness ceiling.
pub fn satisfying_outside(
    model: &ProgramModel,
    formula: &Formula,
    reach: &HashSet<ProgramState>,
    domain: u64,
) -> u64 {
    count_outside(model, formula, reach, domain, cfg!(feature = "parallel"))
}

/// Sequential reference path for [`satisfying_outside`].
pub fn satisfying_outside_seq(
    model: &ProgramModel,
    formula: &Formula,
    reach: &HashSet<ProgramState>,
    domain: u64,
) -> u64 {
    count_outside(model, formula, reach, domain, false)
}

/// Checks `formula` against every reachable state, then measures how
/// much of the rest of the domain it admits: exhaustively when the
/// domain product is at most `tightness_ceiling`, otherwise by
/// `tightness_samples` uniform draws.
pub fn verify_invariant(
    model: &ProgramModel,
    formula: &Formula,
    state_ceiling: usize,
    tightness_ceiling: u64,
    tightness_samples: u64,
) -> Result<VerifyOutcome, ReachError> {
    let reach = reach_fixpoint(model, state_ceiling)?;

    let mut violations: Vec<ProgramState> =
        reach.iter().filter(|s| !formula.eval(s)).cloned().collect();
    violations.sort();
    let verdict = if violations.is_empty() {
        Verdict::Sound
    } else {
        let total = violations.len();
        violations.truncate(WITNESS_LIMIT);
        Verdict::Unsound { witnesses: violations, violations: total }
    };

    let indexer = DomainIndexer::new(model);
    let total = indexer.total();
    let tightness = if total <= BigUint::from(tightness_ceiling) {
        let domain: u64 = total.try_into().expect("domain fits ceiling");
        Tightness::Exhaustive {
            satisfying_outside: satisfying_outside(model, formula, &reach, domain),
            domain,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
        let layout = model.layout();
        let mut hits = 0u64;
        for _ in 0..tightness_samples {
            let s = random_domain_state(layout, &mut rng);
            if formula.eval(&s) && !reach.contains(&s) {
                hits += 1;
            }
        }
        Tightness::Sampled { satisfying_outside: hits, samples: tightness_samples }
    };

    Ok(VerifyOutcome { verdict, reachable_states: reach.len(), tightness })
}

fn random_domain_state(
    layout: &crate::lang::model::VarLayout,
    rng: &mut ChaCha8Rng,
) -> ProgramState {
    use rand::Rng;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::DEFAULT_STATE_CEILING;
    use crate::formula::parse_formula;
    use crate::lang::parse_model;

    #[test]
    fn mutual_exclusion_bound_is_sound_on_peterson() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let f = parse_formula("ncrit <= 1", m.layout()).unwrap();
        let out =
            verify_invariant(&m, &f, DEFAULT_STATE_CEILING, 1 << 21, 10_000).unwrap();
        assert_eq!(out.verdict, Verdict::Sound);
    }

    #[test]
    fn too_tight_bound_yields_witnesses() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let f = parse_formula("ncrit == 0", m.layout()).unwrap();
        let out =
            verify_invariant(&m, &f, DEFAULT_STATE_CEILING, 1 << 21, 10_000).unwrap();
        match out.verdict {
            Verdict::Unsound { witnesses, violations } => {
                assert!(violations > 0);
                assert!(!witnesses.is_empty() && witnesses.len() <= 10);
                let ncrit = m.layout().lookup("ncrit").unwrap();
                assert!(witnesses.iter().all(|s| s.get(ncrit) == 1));
            }
            Verdict::Sound => panic!("ncrit == 0 cannot be an invariant"),
        }
    }

    #[test]
    fn constant_true_tightness_is_domain_minus_reach() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let f = parse_formula("true", m.layout()).unwrap();
        let out =
            verify_invariant(&m, &f, DEFAULT_STATE_CEILING, 1 << 21, 10_000).unwrap();
        assert_eq!(out.verdict, Verdict::Sound);
        match out.tightness {
            Tightness::Exhaustive { satisfying_outside, domain } => {
                assert_eq!(domain, 9 * 9 * 2 * 2 * 2 * 256);
                assert_eq!(satisfying_outside, domain - out.reachable_states as u64);
            }
            other => panic!("expected exhaustive tightness, got {other:?}"),
        }
    }

    #[test]
    fn oversized_domain_falls_back_to_sampling() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let f = parse_formula("true", m.layout()).unwrap();
        let out = verify_invariant(&m, &f, DEFAULT_STATE_CEILING, 1024, 500).unwrap();
        match out.tightness {
            Tightness::Sampled { satisfying_outside, samples } => {
                assert_eq!(samples, 500);
                // Nearly every random domain state is unreachable.
                assert!(satisfying_outside > 400);
            }
            other => panic!("expected sampled tightness, got {other:?}"),
        }
    }

    #[test]
    fn parallel_and_sequential_scans_agree() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let f = parse_formula("ncrit <= 1 && flag[0] <= turn", m.layout()).unwrap();
        let reach = crate::exec::reach_fixpoint(&m, DEFAULT_STATE_CEILING).unwrap();
        let domain = 9 * 9 * 2 * 2 * 2 * 256;
        assert_eq!(
            satisfying_outside(&m, &f, &reach, domain),
            satisfying_outside_seq(&m, &f, &reach, domain)
        );
    }
}
