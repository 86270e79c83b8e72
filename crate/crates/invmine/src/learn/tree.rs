//! Decision-tree partitioning around the enumerative learner. When an
//! example set outgrows the leaf bound, it splits on the
//! highest-precision atom and recurses on the two sides of the split,
//! combining the branch formulas under the atom and its negation.

use std::time::Instant;

use num_rational::Ratio;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{precision_of_signature, signature_direct, Atom, ExampleSets, Formula};
use crate::learn::enumerate::{atom_signatures, inv_learn};
use crate::learn::{LearnError, LearnResult, LearnStats, LearnerConfig};
use crate::par;

/// Learns a classifier with recall 1 on `ex.positives()` and precision
/// strictly above `cfg.delta` over all examples. Requires at least one
/// positive example. Deterministic for a fixed rng seed.
pub fn decision_tree_learn(
    ex: &ExampleSets,
    cfg: &LearnerConfig,
    atoms: &[Atom],
    rng: &mut ChaCha8Rng,
) -> Result<LearnResult, LearnError> {
    cfg.validate()?;
    if ex.positives().is_empty() {
        return Err(LearnError::EmptyPositives);
    }
    let start = Instant::now();
    let mut result = learn_node(ex, cfg, atoms, rng, 0)?;
    result.stats.wall_time = start.elapsed();
    result.stats.atoms_enumerated = result.stats.atoms_enumerated.max(atoms.len());

    // Returned-invariant contract: full recall and precision at this node.
    let sig = signature_direct(&result.formula, ex);
    let p = ex.positives().len();
    if sig.count_ones_prefix(p) != p || precision_of_signature(&sig, p) <= cfg.delta {
        return Err(LearnError::ContractViolation);
    }
    Ok(result)
}

fn learn_node(
    ex: &ExampleSets,
    cfg: &LearnerConfig,
    atoms: &[Atom],
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<LearnResult, LearnError> {
    // Guaranteed-success leaves: nothing to cover, or nothing to exclude.
    if ex.positives().is_empty() {
        return Ok(leaf(Formula::truth(false)));
    }
    if ex.negatives().is_empty() {
        return Ok(leaf(Formula::truth(true)));
    }
    if depth > cfg.max_tree_depth {
        return Err(LearnError::DepthExceeded(cfg.max_tree_depth));
    }

    let mut leaf_failure: Option<LearnError> = None;
    if ex.total() <= cfg.leaf_bound {
        match inv_learn(ex, cfg, atoms, rng) {
            Ok(res) => return Ok(res),
            // Enumeration gave up: force one split below, which strictly
            // shrinks both sides, and try again on the pieces.
            Err(e @ (LearnError::Exhausted { .. } | LearnError::RoundsExhausted { .. })) => {
                leaf_failure = Some(e);
            }
            Err(other) => return Err(other),
        }
    }

    let split = match choose_split(ex, atoms) {
        Some(s) => s,
        None => return Err(leaf_failure.unwrap_or(LearnError::NoSplit)),
    };
    let atom = atoms[split];

    let mut p_true = Vec::new();
    let mut p_false = Vec::new();
    for s in ex.positives() {
        if atom.eval(s) {
            p_true.push(s.clone());
        } else {
            p_false.push(s.clone());
        }
    }
    let mut n_true = Vec::new();
    let mut n_false = Vec::new();
    for s in ex.negatives() {
        if atom.eval(s) {
            n_true.push(s.clone());
        } else {
            n_false.push(s.clone());
        }
    }

    let ex_true = ExampleSets::new(p_true, n_true);
    let ex_false = ExampleSets::new(p_false, n_false);
    let mut rng_true = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let mut rng_false = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let (left, right) = par::join(
        || learn_node(&ex_true, cfg, atoms, &mut rng_true, depth + 1),
        || learn_node(&ex_false, cfg, atoms, &mut rng_false, depth + 1),
    );
    let (left, right) = (left?, right?);

    let mut stats = LearnStats { tree_nodes: 1, splits: vec![atom], ..LearnStats::default() };
    stats.absorb(left.stats);
    stats.absorb(right.stats);

    // (atom && left) || (!atom && right); a constant-false branch
    // reduces the disjunction to the other side.
    let guard = Formula::atom(atom);
    let formula = if left.formula.is_const_false() && right.formula.is_const_false() {
        Formula::truth(false)
    } else if left.formula.is_const_false() {
        Formula::and(Formula::not(guard), right.formula)
    } else if right.formula.is_const_false() {
        Formula::and(guard, left.formula)
    } else {
        Formula::or(
            Formula::and(guard.clone(), left.formula),
            Formula::and(Formula::not(guard), right.formula),
        )
    };
    Ok(LearnResult { formula, stats })
}

fn leaf(formula: Formula) -> LearnResult {
    LearnResult {
        formula,
        stats: LearnStats { tree_nodes: 1, ..LearnStats::default() },
    }
}

/// Picks the atom with the highest precision over the examples,
/// skipping atoms that do not split (constant over the set). Ties go
/// to the lowest atom in canonical order.
fn choose_split(ex: &ExampleSets, atoms: &[Atom]) -> Option<usize> {
    let sigs = atom_signatures(atoms, ex);
    let p = ex.positives().len();
    let total = ex.total();
    let mut best: Option<(Ratio<u64>, usize)> = None;
    for (i, sig) in sigs.iter().enumerate() {
        let sat = sig.count_ones();
        if sat == 0 || sat == total {
            continue;
        }
        let precision = precision_of_signature(sig, p);
        let better = match &best {
            None => true,
            Some((bp, bi)) => {
                precision > *bp || (precision == *bp && atoms[i] < atoms[*bi])
            }
        };
        if better {
            best = Some((precision, i));
        }
    }
    best.map(|(_, i)| i)
}
