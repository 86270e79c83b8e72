//! Boolean formula AST over atomic predicates.

use std::sync::Arc;

use crate::exec::state::ProgramState;
use crate::formula::atom::Atom;

/// Binary connectives available to the enumerative learner. Exclusive
/// or is expressible as a negated biconditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub const ALL: [Connective; 4] =
        [Connective::And, Connective::Or, Connective::Implies, Connective::Iff];

    pub fn glyph(self) -> &'static str {
        match self {
            Connective::And => "&&",
            Connective::Or => "||",
            Connective::Implies => "=>",
            Connective::Iff => "<=>",
        }
    }
}

/// A Boolean formula. Subtrees are shared (`Arc`) so enumerative
/// composition of banked subformulas is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Arc<Formula>),
    Bin(Connective, Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    pub fn truth(value: bool) -> Self {
        Formula::Atom(Atom::Const(value))
    }

    pub fn not(f: impl Into<Arc<Formula>>) -> Self {
        Formula::Not(f.into())
    }

    pub fn bin(
        op: Connective,
        l: impl Into<Arc<Formula>>,
        r: impl Into<Arc<Formula>>,
    ) -> Self {
        Formula::Bin(op, l.into(), r.into())
    }

    pub fn and(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::Bin(Connective::And, l.into(), r.into())
    }

    pub fn or(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::Bin(Connective::Or, l.into(), r.into())
    }

    /// Total AST node count; atoms count one, every connective adds one.
    pub fn len(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.len(),
            Formula::Bin(_, l, r) => 1 + l.len() + r.len(),
        }
    }

    pub fn is_const_false(&self) -> bool {
        matches!(self, Formula::Atom(Atom::Const(false)))
    }

    pub fn is_const_true(&self) -> bool {
        matches!(self, Formula::Atom(Atom::Const(true)))
    }

    /// Standard Boolean semantics; implication and biconditional are
    /// material.
    pub fn eval(&self, state: &ProgramState) -> bool {
        match self {
            Formula::Atom(a) => a.eval(state),
            Formula::Not(f) => !f.eval(state),
            Formula::Bin(op, l, r) => {
                let (a, b) = (l.eval(state), r.eval(state));
                match op {
                    Connective::And => a && b,
                    Connective::Or => a || b,
                    Connective::Implies => !a || b,
                    Connective::Iff => a == b,
                }
            }
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::atom::{Atom, CmpOp};
    use crate::lang::model::SlotId;

    fn st(vals: Vec<i64>) -> ProgramState {
        ProgramState { pcs: vec![], vals }
    }

    #[test]
    fn len_counts_every_node() {
        let a = Formula::atom(Atom::Const(true));
        assert_eq!(a.len(), 1);
        let n = Formula::not(a.clone());
        assert_eq!(n.len(), 2);
        let b = Formula::and(n, a);
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn contradiction_is_always_false() {
        let f = Formula::atom(Atom::Cmp { slot: SlotId(0), op: CmpOp::Le, value: 3 });
        let contradiction = Formula::and(f.clone(), Formula::not(f));
        for v in [0, 3, 7] {
            assert!(!contradiction.eval(&st(vec![v])));
        }
    }

    #[test]
    fn iff_matches_equality_of_truth_values() {
        let f = Formula::atom(Atom::Cmp { slot: SlotId(0), op: CmpOp::Eq, value: 1 });
        let g = Formula::atom(Atom::Cmp { slot: SlotId(1), op: CmpOp::Eq, value: 1 });
        let iff = Formula::bin(Connective::Iff, f.clone(), g.clone());
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let s = st(vec![a, b]);
            assert_eq!(iff.eval(&s), f.eval(&s) == g.eval(&s));
        }
    }
}
