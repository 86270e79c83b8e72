//! Canonical infix text for formulas, and the parser that reads it
//! back. `verify` accepts anything this grammar produces plus ad-hoc
//! comparisons like `ncrit < 2` (strict comparisons normalize to the
//! atom shapes).

use thiserror::Error;

use crate::formula::ast::{Connective, Formula};
use crate::formula::atom::{Atom, CmpOp};
use crate::lang::lexer::{tokenize, Tok, Token};
use crate::lang::model::{SlotClass, SlotId, VarLayout};

pub fn atom_text(atom: &Atom, layout: &VarLayout) -> String {
    match atom {
        Atom::Const(b) => b.to_string(),
        Atom::Cmp { slot, op, value } => {
            let info = layout.slot(*slot);
            let rhs = match &info.enum_values {
                Some(vals) => vals[*value as usize].clone(),
                None => value.to_string(),
            };
            format!("{} {} {}", info.name, op.glyph(), rhs)
        }
        Atom::VarCmp { lhs, op, rhs } => format!(
            "{} {} {}",
            layout.slot(*lhs).name,
            op.glyph(),
            layout.slot(*rhs).name
        ),
    }
}

/// Canonical rendering: every composite operand is parenthesized.
pub fn to_text(f: &Formula, layout: &VarLayout) -> String {
    match f {
        Formula::Atom(a) => atom_text(a, layout),
        Formula::Not(inner) => format!("!({})", to_text(inner, layout)),
        Formula::Bin(op, l, r) => format!(
            "({}) {} ({})",
            to_text(l, layout),
            op.glyph(),
            to_text(r, layout)
        ),
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invariant text: {message}")]
pub struct FormulaParseError {
    pub message: String,
}

fn err<T>(message: impl Into<String>) -> Result<T, FormulaParseError> {
    Err(FormulaParseError { message: message.into() })
}

struct P<'a> {
    toks: Vec<Token>,
    pos: usize,
    layout: &'a VarLayout,
}

/// Parses the canonical formula syntax against a model's layout.
pub fn parse_formula(text: &str, layout: &VarLayout) -> Result<Formula, FormulaParseError> {
    let toks = tokenize(text, "<invariant>")
        .map_err(|d| FormulaParseError { message: d.message })?;
    let mut p = P { toks, pos: 0, layout };
    let f = p.parse_iff()?;
    if *p.peek() != Tok::Eof {
        return err(format!("unexpected trailing {}", p.peek().describe()));
    }
    Ok(f)
}

impl<'a> P<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn parse_iff(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.parse_implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.parse_implies()?;
            lhs = Formula::bin(Connective::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_implies(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.parse_or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            // Right-associative.
            let rhs = self.parse_implies()?;
            return Ok(Formula::bin(Connective::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.parse_and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.parse_unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.parse_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.parse_iff()?;
                if self.bump() != Tok::RParen {
                    return err("expected `)`");
                }
                Ok(inner)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::truth(true))
            }
            Tok::False => {
                self.bump();
                Ok(Formula::truth(false))
            }
            Tok::Ident(_) => self.parse_atom(),
            other => err(format!("expected formula, found {}", other.describe())),
        }
    }

    fn parse_slot(&mut self) -> Result<SlotId, FormulaParseError> {
        let name = match self.bump() {
            Tok::Ident(n) => n,
            other => return err(format!("expected variable, found {}", other.describe())),
        };
        let full = if *self.peek() == Tok::LBracket {
            self.bump();
            let idx = match self.bump() {
                Tok::Int(n) => n,
                other => return err(format!("expected index, found {}", other.describe())),
            };
            if self.bump() != Tok::RBracket {
                return err("expected `]`");
            }
            format!("{name}[{idx}]")
        } else {
            name
        };
        self.layout
            .lookup(&full)
            .ok_or(FormulaParseError { message: format!("unknown variable `{full}`") })
    }

    fn parse_atom(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.parse_slot()?;
        let op = self.bump();
        // Constant right-hand side: integer, negative integer, or enum value.
        match self.peek().clone() {
            Tok::Int(_) | Tok::Minus => {
                let neg = if *self.peek() == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let c = match self.bump() {
                    Tok::Int(n) => {
                        if neg {
                            -n
                        } else {
                            n
                        }
                    }
                    other => return err(format!("expected integer, found {}", other.describe())),
                };
                self.const_atom(lhs, op, c)
            }
            Tok::True | Tok::False => {
                let c = (self.bump() == Tok::True) as i64;
                self.const_atom(lhs, op, c)
            }
            Tok::Ident(name) => {
                let info = self.layout.slot(lhs);
                if let Some(vals) = &info.enum_values {
                    if let Some(ix) = vals.iter().position(|v| v == &name) {
                        self.bump();
                        return self.const_atom(lhs, op, ix as i64);
                    }
                }
                let rhs = self.parse_slot()?;
                self.var_atom(lhs, op, rhs)
            }
            other => err(format!("expected comparison operand, found {}", other.describe())),
        }
    }

    /// Builds a constant atom with the same normalization as atom
    /// instantiation; comparisons that are vacuous over the domain
    /// become `true`/`false` constants.
    fn const_atom(&self, slot: SlotId, op: Tok, c: i64) -> Result<Formula, FormulaParseError> {
        let info = self.layout.slot(slot);
        let (lo, hi) = (info.lo, info.hi);
        let named = &info.name;
        let (op, c) = match op {
            Tok::Le => (CmpOp::Le, c),
            Tok::Ge => (CmpOp::Ge, c),
            Tok::EqEq => (CmpOp::Eq, c),
            Tok::NotEq => (CmpOp::Ne, c),
            Tok::Lt => (CmpOp::Le, c - 1),
            Tok::Gt => (CmpOp::Ge, c + 1),
            other => return err(format!("expected comparison after `{named}`, found {}", other.describe())),
        };
        if matches!(info.class, SlotClass::Enum { .. }) && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
            return err(format!("enum variable `{named}` only supports == and != comparisons"));
        }
        let f = match op {
            CmpOp::Le if c >= hi => Formula::truth(true),
            CmpOp::Le if c < lo => Formula::truth(false),
            CmpOp::Ge if c <= lo => Formula::truth(true),
            CmpOp::Ge if c > hi => Formula::truth(false),
            CmpOp::Eq if c < lo || c > hi => Formula::truth(false),
            CmpOp::Ne if c < lo || c > hi => Formula::truth(true),
            op => Formula::atom(Atom::Cmp { slot, op, value: c }),
        };
        Ok(f)
    }

    fn var_atom(&self, lhs: SlotId, op: Tok, rhs: SlotId) -> Result<Formula, FormulaParseError> {
        let f = match op {
            Tok::EqEq => Formula::atom(Atom::VarCmp { lhs, op: CmpOp::Eq, rhs }),
            Tok::NotEq => Formula::atom(Atom::VarCmp { lhs, op: CmpOp::Ne, rhs }),
            Tok::Le => Formula::atom(Atom::VarCmp { lhs, op: CmpOp::Le, rhs }),
            Tok::Ge => Formula::atom(Atom::VarCmp { lhs: rhs, op: CmpOp::Le, rhs: lhs }),
            Tok::Lt => Formula::not(Formula::atom(Atom::VarCmp { lhs: rhs, op: CmpOp::Le, rhs: lhs })),
            Tok::Gt => Formula::not(Formula::atom(Atom::VarCmp { lhs, op: CmpOp::Le, rhs })),
            other => return err(format!("expected comparison, found {}", other.describe())),
        };
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_model;

    fn peterson_layout() -> crate::lang::ProgramModel {
        parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap()
    }

    #[test]
    fn canonical_text_round_trips() {
        let m = peterson_layout();
        let layout = m.layout();
        let ncrit = layout.lookup("ncrit").unwrap();
        let flag1 = layout.lookup("flag[1]").unwrap();
        let f = Formula::and(
            Formula::atom(Atom::Cmp { slot: ncrit, op: CmpOp::Le, value: 1 }),
            Formula::not(Formula::atom(Atom::Cmp { slot: flag1, op: CmpOp::Eq, value: 0 })),
        );
        let text = to_text(&f, layout);
        assert_eq!(text, "(ncrit <= 1) && (!(flag[1] == 0))");
        let back = parse_formula(&text, layout).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn strict_comparisons_normalize() {
        let m = peterson_layout();
        let layout = m.layout();
        let f = parse_formula("ncrit < 2", layout).unwrap();
        let ncrit = layout.lookup("ncrit").unwrap();
        assert_eq!(f, Formula::atom(Atom::Cmp { slot: ncrit, op: CmpOp::Le, value: 1 }));
    }

    #[test]
    fn out_of_domain_comparisons_become_constants() {
        let m = peterson_layout();
        let layout = m.layout();
        assert!(parse_formula("ncrit <= 300", layout).unwrap().is_const_true());
        assert!(parse_formula("turn >= 9", layout).unwrap().is_const_false());
    }

    #[test]
    fn pc_slots_are_addressable() {
        let m = peterson_layout();
        let layout = m.layout();
        let f = parse_formula("_pc[0] <= 3", layout).unwrap();
        let pc0 = layout.lookup("_pc[0]").unwrap();
        assert_eq!(f, Formula::atom(Atom::Cmp { slot: pc0, op: CmpOp::Le, value: 3 }));
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let m = peterson_layout();
        let e = parse_formula("bogus == 1", m.layout()).unwrap_err();
        assert!(e.message.contains("unknown variable"), "{e}");
    }

    #[test]
    fn implies_and_iff_parse_with_low_precedence() {
        let m = peterson_layout();
        let layout = m.layout();
        let f = parse_formula("ncrit >= 1 => flag[0] == 1 || flag[1] == 1", layout).unwrap();
        match f {
            Formula::Bin(Connective::Implies, _, rhs) => {
                assert!(matches!(*rhs, Formula::Bin(Connective::Or, _, _)))
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn enum_values_parse_by_name() {
        let m = parse_model(
            "enum { idle, busy } st;\nproc p { st = busy; }",
            "t.mpl",
        )
        .unwrap();
        let layout = m.layout();
        let f = parse_formula("st == busy", layout).unwrap();
        let st = layout.lookup("st").unwrap();
        assert_eq!(f, Formula::atom(Atom::Cmp { slot: st, op: CmpOp::Eq, value: 1 }));
        assert_eq!(to_text(&f, layout), "st == busy");
    }
}
