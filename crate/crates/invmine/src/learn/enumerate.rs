//! Bottom-up enumerative synthesis with observational-equivalence
//! pruning, plus the sub-sampling outer loop.

use std::collections::HashSet;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::index::sample as index_sample;
use rand_chacha::ChaCha8Rng;

use crate::exec::state::ProgramState;
use crate::formula::{
    precision_of_signature, signature_direct, Atom, Connective, ExampleSets, Formula, Signature,
};
use crate::learn::{LearnError, LearnResult, LearnStats, LearnerConfig};
use crate::par;

/// Signatures of each atom over the examples, input order preserved.
/// Runs on the rayon pool when the `parallel` feature is enabled.
pub fn atom_signatures(atoms: &[Atom], ex: &ExampleSets) -> Vec<Signature> {
    par::map_collect(atoms, |a| {
        Signature::from_fn(ex.total(), |i| a.eval(ex.example(i)))
    })
}

/// Sequential reference path for [`atom_signatures`].
pub fn atom_signatures_seq(atoms: &[Atom], ex: &ExampleSets) -> Vec<Signature> {
    par::map_collect_seq(atoms, |a| {
        Signature::from_fn(ex.total(), |i| a.eval(ex.example(i)))
    })
}

/// Tracks which signatures have been seen; the first (shortest)
/// representative of each observational-equivalence class wins.
#[derive(Debug, Default)]
pub struct SignatureDeduper {
    seen: HashSet<Signature>,
}

impl SignatureDeduper {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the signature; `false` means an equivalent candidate
    /// was already kept.
    pub fn is_novel(&mut self, sig: &Signature) -> bool {
        self.seen.insert(sig.clone())
    }
}

/// Filters a candidate stream down to its first representative per
/// signature.
pub fn dedup_by_signature<I>(candidates: I) -> impl Iterator<Item = (Formula, Signature)>
where
    I: IntoIterator<Item = (Formula, Signature)>,
{
    let mut dedup = SignatureDeduper::new();
    candidates
        .into_iter()
        .filter(move |(_, sig)| dedup.is_novel(sig))
}

/// Per-length bank of signature-distinct formulas.
struct Bank {
    by_len: Vec<Vec<(Formula, Signature)>>,
}

impl Bank {
    fn new(max_len: usize) -> Self {
        Bank { by_len: vec![Vec::new(); max_len + 1] }
    }
}

struct EnumOutcome {
    accepted: Option<Formula>,
    best: Option<(Ratio<u64>, Ratio<u64>, Formula)>,
    enumerated: u64,
    deduped: u64,
    bank: Bank,
}

/// Enumerates candidates by increasing length: first atoms, then
/// negations of length `l - 1` bank entries, then binary combinations
/// of bank entries whose lengths sum to `l - 1`. Stops at the first
/// candidate `check` accepts.
fn enumerate_candidates(
    atoms: &[Atom],
    atom_sigs: &[Signature],
    p_len: usize,
    max_len: usize,
    mut check: impl FnMut(&Signature) -> bool,
) -> EnumOutcome {
    let mut bank = Bank::new(max_len);
    let mut dedup = SignatureDeduper::new();
    let mut enumerated = 0u64;
    let mut deduped = 0u64;
    // Best candidate so far by (recall, precision), for diagnostics.
    let mut best: Option<(Ratio<u64>, Ratio<u64>, Formula)> = None;

    macro_rules! consider {
        ($formula:expr, $sig:expr, $len:expr) => {{
            let sig: Signature = $sig;
            enumerated += 1;
            if dedup.is_novel(&sig) {
                let f: Formula = $formula;
                let recall = Ratio::new(sig.count_ones_prefix(p_len) as u64, p_len.max(1) as u64);
                let precision = precision_of_signature(&sig, p_len);
                if best
                    .as_ref()
                    .map(|(br, bp, _)| (recall, precision) > (*br, *bp))
                    .unwrap_or(true)
                {
                    best = Some((recall, precision, f.clone()));
                }
                if check(&sig) {
                    return EnumOutcome {
                        accepted: Some(f),
                        best,
                        enumerated,
                        deduped,
                        bank,
                    };
                }
                bank.by_len[$len].push((f, sig));
            } else {
                deduped += 1;
            }
        }};
    }

    for len in 1..=max_len {
        if len == 1 {
            for (atom, sig) in atoms.iter().zip(atom_sigs) {
                consider!(Formula::atom(*atom), sig.clone(), 1);
            }
            continue;
        }
        // Negations of length len-1.
        for i in 0..bank.by_len[len - 1].len() {
            let (f, sig) = &bank.by_len[len - 1][i];
            let (nf, nsig) = (Formula::not(f.clone()), sig.bw_not());
            consider!(nf, nsig, len);
        }
        // Binary combinations with operand lengths summing to len-1.
        if len >= 3 {
            for l1 in 1..=(len - 2) {
                let l2 = len - 1 - l1;
                for i in 0..bank.by_len[l1].len() {
                    for j in 0..bank.by_len[l2].len() {
                        for op in Connective::ALL {
                            let (f1, s1) = &bank.by_len[l1][i];
                            let (f2, s2) = &bank.by_len[l2][j];
                            let sig = crate::formula::compose(op, s1, s2);
                            let f = Formula::bin(op, f1.clone(), f2.clone());
                            consider!(f, sig, len);
                        }
                    }
                }
            }
        }
    }

    EnumOutcome { accepted: None, best, enumerated, deduped, bank }
}

/// Every signature-distinct formula of length at most `max_len` over
/// the atom set, in enumeration order. Exposed for completeness
/// checks against brute-force oracles.
pub fn enumerate_formulas(
    atoms: &[Atom],
    ex: &ExampleSets,
    max_len: usize,
) -> Vec<(Formula, Signature)> {
    let sigs = atom_signatures(atoms, ex);
    let outcome = enumerate_candidates(atoms, &sigs, ex.positives().len(), max_len, |_| false);
    let mut out = Vec::new();
    for level in outcome.bank.by_len {
        out.extend(level);
    }
    out
}

/// Uniform draw without replacement, kept in ascending index order so
/// example ordering is stable within a learning round.
struct Subsample {
    selected: Vec<usize>,
    member: HashSet<usize>,
    universe: usize,
    draw: usize,
}

impl Subsample {
    fn new(universe: usize, draw: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut s = Subsample {
            selected: Vec::new(),
            member: HashSet::new(),
            universe,
            draw,
        };
        s.grow(rng);
        s
    }

    /// Draws another round of indices and unions them in (Alg-style
    /// sub-sample growth); new indices append in ascending order.
    fn grow(&mut self, rng: &mut ChaCha8Rng) {
        if self.universe == 0 {
            return;
        }
        let amount = self.draw.min(self.universe);
        let mut fresh: Vec<usize> = index_sample(rng, self.universe, amount)
            .into_iter()
            .filter(|i| !self.member.contains(i))
            .collect();
        fresh.sort_unstable();
        for i in fresh {
            self.member.insert(i);
            self.selected.push(i);
        }
    }

    fn view(&self, items: &[ProgramState]) -> Vec<ProgramState> {
        self.selected.iter().map(|&i| items[i].clone()).collect()
    }
}

/// Enumerative invariant learning over a sub-sample, validated against
/// the full sets. A candidate passes when its precision on the
/// sub-sample strictly exceeds delta and its recall is 1; it is
/// returned once the same holds on the full sets, otherwise the
/// sub-samples grow and enumeration restarts.
pub fn inv_learn(
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
    let mut stats = LearnStats {
        atoms_enumerated: atoms.len(),
        tree_nodes: 1,
        ..LearnStats::default()
    };
    let mut best: Option<Box<Formula>> = None;
    let mut psub = Subsample::new(ex.positives().len(), cfg.subsample_size, rng);
    let mut nsub = Subsample::new(ex.negatives().len(), cfg.subsample_size, rng);
    let full_p = ex.positives().len();

    for round in 1..=cfg.max_subsample_rounds {
        let sub = ExampleSets::new(psub.view(ex.positives()), nsub.view(ex.negatives()));
        let sub_p = sub.positives().len();
        let atom_sigs = atom_signatures(atoms, &sub);
        let delta = cfg.delta;
        let outcome = enumerate_candidates(atoms, &atom_sigs, sub_p, cfg.max_inv_length, |sig| {
            sig.count_ones_prefix(sub_p) == sub_p && precision_of_signature(sig, sub_p) > delta
        });
        stats.formulas_enumerated += outcome.enumerated;
        stats.signatures_deduped += outcome.deduped;
        match outcome.accepted {
            None => {
                // Growing the sub-sample only adds constraints, so a
                // length-exhausted enumeration cannot be rescued.
                stats.wall_time = start.elapsed();
                return Err(LearnError::Exhausted {
                    max_len: cfg.max_inv_length,
                    best: outcome.best.map(|(_, _, f)| Box::new(f)).or(best),
                    stats,
                });
            }
            Some(candidate) => {
                let full_sig = signature_direct(&candidate, ex);
                let full_recall_ok = full_sig.count_ones_prefix(full_p) == full_p;
                let full_precision = precision_of_signature(&full_sig, full_p);
                if full_recall_ok && full_precision > cfg.delta {
                    stats.wall_time = start.elapsed();
                    return Ok(LearnResult { formula: candidate, stats });
                }
                best = Some(Box::new(candidate));
                if round < cfg.max_subsample_rounds {
                    psub.grow(rng);
                    nsub.grow(rng);
                }
            }
        }
    }
    stats.wall_time = start.elapsed();
    Err(LearnError::RoundsExhausted {
        rounds: cfg.max_subsample_rounds,
        best,
        stats,
    })
}
