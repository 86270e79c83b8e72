//! Formula signatures: bit-vectors of truth values over the ordered
//! concatenation of positive and negative examples, composable with
//! bitwise operations, plus exact precision/recall.

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::exec::state::ProgramState;
use crate::formula::ast::{Connective, Formula};

/// Packed bit-vector keyed by example index. Bit `i` is 1 iff the
/// `i`-th concatenated example satisfies the formula. Trailing bits of
/// the last word are kept zero so equality and hashing are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    words: Vec<u64>,
    len: usize,
}

impl Signature {
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if f(i) {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        Signature { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn bw_and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn bw_or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn bw_xor(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn bw_not(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        Self::mask_tail(&mut words, self.len);
        Signature { words, len: self.len }
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "signature lengths differ");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Signature { words, len: self.len }
    }

    fn mask_tail(words: &mut [u64], len: usize) {
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    /// Number of set bits among the first `n` positions.
    pub fn count_ones_prefix(&self, n: usize) -> usize {
        debug_assert!(n <= self.len);
        let full = n / 64;
        let mut total: usize = self.words[..full].iter().map(|w| w.count_ones() as usize).sum();
        let tail = n % 64;
        if tail != 0 {
            total += (self.words[full] & ((1u64 << tail) - 1)).count_ones() as usize;
        }
        total
    }

    pub fn count_ones(&self) -> usize {
        self.count_ones_prefix(self.len)
    }

    pub fn bits_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

/// Ordered positive and negative example states for one learning
/// round. The orders are fixed at construction; signatures index into
/// the concatenation positives-then-negatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleSets {
    positives: Vec<ProgramState>,
    negatives: Vec<ProgramState>,
}

impl ExampleSets {
    /// The sets must be disjoint.
    pub fn new(positives: Vec<ProgramState>, negatives: Vec<ProgramState>) -> Self {
        debug_assert!(
            {
                let p: std::collections::HashSet<_> = positives.iter().collect();
                negatives.iter().all(|n| !p.contains(n))
            },
            "positive and negative examples overlap"
        );
        ExampleSets { positives, negatives }
    }

    pub fn positives(&self) -> &[ProgramState] {
        &self.positives
    }

    pub fn negatives(&self) -> &[ProgramState] {
        &self.negatives
    }

    pub fn total(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    /// Example by concatenated index: positives first.
    pub fn example(&self, i: usize) -> &ProgramState {
        if i < self.positives.len() {
            &self.positives[i]
        } else {
            &self.negatives[i - self.positives.len()]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProgramState> {
        self.positives.iter().chain(self.negatives.iter())
    }
}

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("recall is undefined without positive examples")]
    EmptyPositives,
}

/// Signature by direct pointwise evaluation; the oracle path.
pub fn signature_direct(f: &Formula, ex: &ExampleSets) -> Signature {
    Signature::from_fn(ex.total(), |i| f.eval(ex.example(i)))
}

/// Memo table from subformula to signature for one example ordering.
pub type SignatureCache = HashMap<Formula, Signature>;

/// Signature via bitwise composition over the formula structure.
/// Subformula signatures are taken from (and stored into) `cache`;
/// atoms are evaluated directly.
pub fn signature_bitwise(f: &Formula, ex: &ExampleSets, cache: &mut SignatureCache) -> Signature {
    if let Some(sig) = cache.get(f) {
        return sig.clone();
    }
    let sig = match f {
        Formula::Atom(a) => Signature::from_fn(ex.total(), |i| a.eval(ex.example(i))),
        Formula::Not(inner) => signature_bitwise(inner, ex, cache).bw_not(),
        Formula::Bin(op, l, r) => {
            let sl = signature_bitwise(l, ex, cache);
            let sr = signature_bitwise(r, ex, cache);
            compose(*op, &sl, &sr)
        }
    };
    cache.insert(f.clone(), sig.clone());
    sig
}

/// Bitwise composition rule for one connective. Implication and
/// biconditional derive from the primitive and/or/not/xor rules.
pub fn compose(op: Connective, l: &Signature, r: &Signature) -> Signature {
    match op {
        Connective::And => l.bw_and(r),
        Connective::Or => l.bw_or(r),
        Connective::Implies => l.bw_not().bw_or(r),
        Connective::Iff => l.bw_xor(r).bw_not(),
    }
}

/// precision = |{s in P : s |= f}| / |{s in P u N : s |= f}|, exact.
/// A formula satisfied by nothing has precision 0, so it can never
/// win a split.
pub fn precision_of_signature(sig: &Signature, p_len: usize) -> Ratio<u64> {
    let tp = sig.count_ones_prefix(p_len) as u64;
    let sat = sig.count_ones() as u64;
    if sat == 0 {
        Ratio::zero()
    } else {
        Ratio::new(tp, sat)
    }
}

/// recall = |{s in P : s |= f}| / |P|, exact. Requires |P| >= 1.
pub fn recall_of_signature(sig: &Signature, p_len: usize) -> Result<Ratio<u64>, MetricError> {
    if p_len == 0 {
        return Err(MetricError::EmptyPositives);
    }
    let tp = sig.count_ones_prefix(p_len) as u64;
    Ok(Ratio::new(tp, p_len as u64))
}

pub fn precision(f: &Formula, ex: &ExampleSets) -> Ratio<u64> {
    precision_of_signature(&signature_direct(f, ex), ex.positives().len())
}

pub fn recall(f: &Formula, ex: &ExampleSets) -> Result<Ratio<u64>, MetricError> {
    recall_of_signature(&signature_direct(f, ex), ex.positives().len())
}
