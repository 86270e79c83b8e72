//! Parametric atomic predicates and their instantiation from data.
//!
//! Templates are predicate shapes with a constant placeholder; the
//! constant pool for a variable is the set of values it takes in the
//! positive examples plus its domain bounds. Instantiation normalizes
//! away trivial atoms (`v <= hi`), rewrites boundary comparisons to
//! equalities (`v <= lo` becomes `v == lo`), and deduplicates, so for
//! a bool variable only `b == 0` and `b == 1` survive.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::exec::state::ProgramState;
use crate::lang::model::{SlotClass, SlotId, VarLayout};

/// Comparison against a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn glyph(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Le => l <= r,
            CmpOp::Ge => l >= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
        }
    }
}

/// A concrete atomic predicate. The derived `Ord` is the canonical
/// atom order used for tie-breaking and deterministic output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Constant leaf; produced only by the learner, never enumerated.
    Const(bool),
    Cmp { slot: SlotId, op: CmpOp, value: i64 },
    VarCmp { lhs: SlotId, op: CmpOp, rhs: SlotId },
}

impl Atom {
    pub fn eval(&self, state: &ProgramState) -> bool {
        match *self {
            Atom::Const(b) => b,
            Atom::Cmp { slot, op, value } => op.holds(state.get(slot), value),
            Atom::VarCmp { lhs, op, rhs } => op.holds(state.get(lhs), state.get(rhs)),
        }
    }
}

/// Predicate shapes available to the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomTemplate {
    LeqConst,
    GeqConst,
    EqConst,
    NeqConst,
    EqVarVar,
    NeqVarVar,
    LeqVarVar,
}

impl AtomTemplate {
    pub fn all() -> Vec<AtomTemplate> {
        vec![
            AtomTemplate::LeqConst,
            AtomTemplate::GeqConst,
            AtomTemplate::EqConst,
            AtomTemplate::NeqConst,
            AtomTemplate::EqVarVar,
            AtomTemplate::NeqVarVar,
            AtomTemplate::LeqVarVar,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            AtomTemplate::LeqConst => "LEQ_CONST",
            AtomTemplate::GeqConst => "GEQ_CONST",
            AtomTemplate::EqConst => "EQ_CONST",
            AtomTemplate::NeqConst => "NEQ_CONST",
            AtomTemplate::EqVarVar => "EQ_VARVAR",
            AtomTemplate::NeqVarVar => "NEQ_VARVAR",
            AtomTemplate::LeqVarVar => "LEQ_VARVAR",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AtomError {
    #[error("unknown atom template `{0}`")]
    UnknownTemplate(String),
    #[error("the learning alphabet is empty")]
    EmptyAlphabet,
}

impl FromStr for AtomTemplate {
    type Err = AtomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LEQ_CONST" => Ok(AtomTemplate::LeqConst),
            "GEQ_CONST" => Ok(AtomTemplate::GeqConst),
            "EQ_CONST" => Ok(AtomTemplate::EqConst),
            "NEQ_CONST" => Ok(AtomTemplate::NeqConst),
            "EQ_VARVAR" => Ok(AtomTemplate::EqVarVar),
            "NEQ_VARVAR" => Ok(AtomTemplate::NeqVarVar),
            "LEQ_VARVAR" => Ok(AtomTemplate::LeqVarVar),
            other => Err(AtomError::UnknownTemplate(other.to_string())),
        }
    }
}

/// Parses an atom-template configuration: one template name per line,
/// `#` comments and blank lines ignored.
pub fn parse_template_file(text: &str) -> Result<Vec<AtomTemplate>, AtomError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t: AtomTemplate = line.parse()?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn classes_compatible(a: SlotClass, b: SlotClass) -> bool {
    match (a, b) {
        (SlotClass::Bool, SlotClass::Bool) => true,
        (SlotClass::Num, SlotClass::Num) => true,
        (SlotClass::Pc, SlotClass::Pc) => true,
        (SlotClass::Enum { decl: a }, SlotClass::Enum { decl: b }) => a == b,
        _ => false,
    }
}

/// Normalized constant comparison, or `None` when the atom would be
/// trivially true or false over the slot's domain.
fn normalize_cmp(slot: SlotId, lo: i64, hi: i64, op: CmpOp, c: i64) -> Option<Atom> {
    match op {
        CmpOp::Le => {
            if c >= hi || c < lo {
                None
            } else if c == lo {
                Some(Atom::Cmp { slot, op: CmpOp::Eq, value: lo })
            } else {
                Some(Atom::Cmp { slot, op: CmpOp::Le, value: c })
            }
        }
        CmpOp::Ge => {
            if c <= lo || c > hi {
                None
            } else if c == hi {
                Some(Atom::Cmp { slot, op: CmpOp::Eq, value: hi })
            } else {
                Some(Atom::Cmp { slot, op: CmpOp::Ge, value: c })
            }
        }
        CmpOp::Eq => {
            if c < lo || c > hi || lo == hi {
                None
            } else {
                Some(Atom::Cmp { slot, op: CmpOp::Eq, value: c })
            }
        }
        CmpOp::Ne => {
            if c < lo || c > hi || lo == hi {
                None
            } else if hi - lo == 1 {
                // Two-value domain: v != c collapses to v == other.
                let other = if c == lo { hi } else { lo };
                Some(Atom::Cmp { slot, op: CmpOp::Eq, value: other })
            } else {
                Some(Atom::Cmp { slot, op: CmpOp::Ne, value: c })
            }
        }
    }
}

/// Normalized variable-variable comparison, or `None` when trivial.
fn normalize_var_cmp(lhs: SlotId, rhs: SlotId, op: CmpOp, layout: &VarLayout) -> Option<Atom> {
    if lhs == rhs {
        return None;
    }
    let (a, b) = (layout.slot(lhs), layout.slot(rhs));
    match op {
        CmpOp::Eq | CmpOp::Ne => {
            // Disjoint domains make == always false and != always true.
            if a.hi < b.lo || b.hi < a.lo {
                return None;
            }
            if a.lo == a.hi && b.lo == b.hi {
                return None;
            }
            let (lhs, rhs) = if lhs < rhs { (lhs, rhs) } else { (rhs, lhs) };
            Some(Atom::VarCmp { lhs, op, rhs })
        }
        CmpOp::Le => {
            if a.hi <= b.lo || a.lo > b.hi {
                return None;
            }
            Some(Atom::VarCmp { lhs, op: CmpOp::Le, rhs })
        }
        CmpOp::Ge => normalize_var_cmp(rhs, lhs, CmpOp::Le, layout),
    }
}

/// Instantiates the template set over the alphabet. Constants range
/// over the values each variable takes in `positives` plus its domain
/// bounds. Output is deduplicated and canonically ordered.
pub fn instantiate_atoms(
    layout: &VarLayout,
    positives: &[ProgramState],
    templates: &[AtomTemplate],
    alphabet: &[SlotId],
) -> Result<Vec<Atom>, AtomError> {
    if alphabet.is_empty() {
        return Err(AtomError::EmptyAlphabet);
    }
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();

    for &slot in alphabet {
        let info = layout.slot(slot);
        let mut consts: BTreeSet<i64> = positives.iter().map(|s| s.get(slot)).collect();
        consts.insert(info.lo);
        consts.insert(info.hi);
        let ordered_ok = !matches!(info.class, SlotClass::Enum { .. });
        for &t in templates {
            let op = match t {
                AtomTemplate::LeqConst if ordered_ok => CmpOp::Le,
                AtomTemplate::GeqConst if ordered_ok => CmpOp::Ge,
                AtomTemplate::EqConst => CmpOp::Eq,
                AtomTemplate::NeqConst => CmpOp::Ne,
                _ => continue,
            };
            for &c in &consts {
                if let Some(atom) = normalize_cmp(slot, info.lo, info.hi, op, c) {
                    atoms.insert(atom);
                }
            }
        }
    }

    for (i, &a) in alphabet.iter().enumerate() {
        for &b in &alphabet[i + 1..] {
            if !classes_compatible(layout.slot(a).class, layout.slot(b).class) {
                continue;
            }
            for &t in templates {
                match t {
                    AtomTemplate::EqVarVar => {
                        atoms.extend(normalize_var_cmp(a, b, CmpOp::Eq, layout));
                    }
                    AtomTemplate::NeqVarVar => {
                        atoms.extend(normalize_var_cmp(a, b, CmpOp::Ne, layout));
                    }
                    AtomTemplate::LeqVarVar => {
                        atoms.extend(normalize_var_cmp(a, b, CmpOp::Le, layout));
                        atoms.extend(normalize_var_cmp(b, a, CmpOp::Le, layout));
                    }
                    _ => {}
                }
            }
        }
    }

    Ok(atoms.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::state::ProgramState;
    use crate::lang::parse_model;

    fn state(m: &crate::lang::ProgramModel, vals: Vec<i64>) -> ProgramState {
        ProgramState { pcs: vec![0; m.process_count()], vals }
    }

    #[test]
    fn byte_pair_with_observed_value_two() {
        let m = parse_model("byte x;\nbyte y;\nproc p { x = 0; }", "t.mpl").unwrap();
        let layout = m.layout();
        let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
        let p = vec![state(&m, vec![2, 2])];
        let atoms = instantiate_atoms(
            layout,
            &p,
            &[AtomTemplate::LeqConst, AtomTemplate::GeqConst],
            &alphabet,
        )
        .unwrap();
        let x = layout.lookup("x").unwrap();
        let y = layout.lookup("y").unwrap();
        // x <= 2, x >= 2 plus the normalized domain-bound atoms
        // (x <= 0 -> x == 0, x >= 255 -> x == 255), same for y.
        let expected: Vec<Atom> = vec![
            Atom::Cmp { slot: x, op: CmpOp::Le, value: 2 },
            Atom::Cmp { slot: x, op: CmpOp::Ge, value: 2 },
            Atom::Cmp { slot: x, op: CmpOp::Eq, value: 0 },
            Atom::Cmp { slot: x, op: CmpOp::Eq, value: 255 },
            Atom::Cmp { slot: y, op: CmpOp::Le, value: 2 },
            Atom::Cmp { slot: y, op: CmpOp::Ge, value: 2 },
            Atom::Cmp { slot: y, op: CmpOp::Eq, value: 0 },
            Atom::Cmp { slot: y, op: CmpOp::Eq, value: 255 },
        ];
        for e in &expected {
            assert!(atoms.contains(e), "missing {e:?} in {atoms:?}");
        }
        assert_eq!(atoms.len(), expected.len());
    }

    #[test]
    fn empty_positives_leave_only_domain_bounds() {
        let m = parse_model("int[3..7] x;\nproc p { x = 3; }", "t.mpl").unwrap();
        let layout = m.layout();
        let alphabet = vec![layout.lookup("x").unwrap()];
        let atoms =
            instantiate_atoms(layout, &[], &AtomTemplate::all(), &alphabet).unwrap();
        for a in &atoms {
            match a {
                Atom::Cmp { value, .. } => assert!([3, 7].contains(value)),
                other => panic!("unexpected atom {other:?}"),
            }
        }
        assert!(!atoms.is_empty());
    }

    #[test]
    fn bool_variable_collapses_to_two_equalities() {
        let m = parse_model("bool b;\nproc p { b = 1; }", "t.mpl").unwrap();
        let layout = m.layout();
        let b = layout.lookup("b").unwrap();
        let p = vec![state(&m, vec![0]), state(&m, vec![1])];
        let atoms = instantiate_atoms(layout, &p, &AtomTemplate::all(), &[b]).unwrap();
        assert_eq!(
            atoms,
            vec![
                Atom::Cmp { slot: b, op: CmpOp::Eq, value: 0 },
                Atom::Cmp { slot: b, op: CmpOp::Eq, value: 1 },
            ]
        );
    }

    #[test]
    fn instantiation_is_deterministic_and_duplicate_free() {
        let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
        let layout = m.layout();
        let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
        let p: Vec<ProgramState> = vec![
            state(&m, vec![0, 1, 0, 0]),
            state(&m, vec![1, 0, 1, 1]),
        ];
        let a1 = instantiate_atoms(layout, &p, &AtomTemplate::all(), &alphabet).unwrap();
        let a2 = instantiate_atoms(layout, &p, &AtomTemplate::all(), &alphabet).unwrap();
        assert_eq!(a1, a2);
        let set: BTreeSet<_> = a1.iter().collect();
        assert_eq!(set.len(), a1.len());
    }

    #[test]
    fn empty_alphabet_is_an_error() {
        let m = parse_model("bool b;\nproc p { b = 1; }", "t.mpl").unwrap();
        let err = instantiate_atoms(m.layout(), &[], &AtomTemplate::all(), &[]).unwrap_err();
        assert_eq!(err, AtomError::EmptyAlphabet);
    }

    #[test]
    fn template_file_parses_names_and_comments() {
        let text = "# shapes\nLEQ_CONST\nEQ_VARVAR\n\nLEQ_CONST # repeated\n";
        let ts = parse_template_file(text).unwrap();
        assert_eq!(ts, vec![AtomTemplate::LeqConst, AtomTemplate::EqVarVar]);
        assert!(parse_template_file("NOPE").is_err());
    }

    #[test]
    fn enum_slots_get_equality_atoms_only() {
        let m = parse_model(
            "enum { idle, busy, done } st;\nproc p { st = busy; }",
            "t.mpl",
        )
        .unwrap();
        let layout = m.layout();
        let st = layout.lookup("st").unwrap();
        let atoms = instantiate_atoms(layout, &[], &AtomTemplate::all(), &[st]).unwrap();
        assert!(atoms
            .iter()
            .all(|a| matches!(a, Atom::Cmp { op: CmpOp::Eq | CmpOp::Ne, .. })));
    }
}
