//! Recursive descent parser for `.mpl` sources.

use crate::diag::{Diagnostic, Loc, Spanned};
use crate::lang::ast::*;
use crate::lang::lexer::{tokenize, Tok, Token};

pub struct Parser<'a> {
    file: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

/// Raw parse output, before static checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawProgram {
    pub decls: Vec<Spanned<RawDecl>>,
    pub procs: Vec<Spanned<ProcDef>>,
}

/// A declaration with its unresolved initializer literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDecl {
    pub name: String,
    pub ty: VarType,
    pub array_len: Option<(usize, Loc)>,
    pub init: Option<Vec<Spanned<RawLiteral>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawLiteral {
    Int(i64),
    Bool(bool),
    /// An enum value name, resolved against the declaration's type later.
    Name(String),
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, file: &'a str) -> Result<Self, Diagnostic> {
        Ok(Parser {
            file,
            tokens: tokenize(src, file)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos].loc
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, loc: Loc, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(self.file, loc, message)
    }

    fn expect(&mut self, want: Tok) -> Result<Token, Diagnostic> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            Err(self.error(
                self.loc(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Loc), Diagnostic> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, loc))
            }
            other => Err(self.error(loc, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(i64, Loc), Diagnostic> {
        let loc = self.loc();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok((if neg { -n } else { n }, loc))
            }
            ref other => {
                Err(self.error(loc, format!("expected {what}, found {}", other.describe())))
            }
        }
    }

    pub fn parse_program(&mut self) -> Result<RawProgram, Diagnostic> {
        let mut decls = Vec::new();
        let mut procs = Vec::new();
        loop {
            match self.peek() {
                Tok::Bool | Tok::Byte | Tok::Int_ | Tok::Enum => {
                    if !procs.is_empty() {
                        return Err(self.error(
                            self.loc(),
                            "variable declarations must precede all proc blocks",
                        ));
                    }
                    decls.push(self.parse_decl()?);
                }
                Tok::Proc => procs.push(self.parse_proc()?),
                Tok::Eof => break,
                other => {
                    return Err(self.error(
                        self.loc(),
                        format!("expected declaration or proc block, found {}", other.describe()),
                    ))
                }
            }
        }
        if procs.is_empty() {
            return Err(self.error(self.loc(), "model has no proc blocks"));
        }
        Ok(RawProgram { decls, procs })
    }

    fn parse_decl(&mut self) -> Result<Spanned<RawDecl>, Diagnostic> {
        let start = self.loc();
        let ty = match self.bump().tok {
            Tok::Bool => VarType::Bool,
            Tok::Byte => VarType::Byte,
            Tok::Int_ => {
                self.expect(Tok::LBracket)?;
                let (lo, _) = self.expect_int("lower bound")?;
                self.expect(Tok::DotDot)?;
                let (hi, hi_loc) = self.expect_int("upper bound")?;
                self.expect(Tok::RBracket)?;
                if lo > hi {
                    return Err(self.error(hi_loc, format!("empty int range [{lo}..{hi}]")));
                }
                const BOUND: i64 = i32::MAX as i64;
                if lo < -BOUND || hi > BOUND {
                    return Err(self.error(hi_loc, "int range bounds must fit in 32 bits"));
                }
                VarType::Int { lo, hi }
            }
            Tok::Enum => {
                self.expect(Tok::LBrace)?;
                let mut vals = vec![self.expect_ident("enum value")?.0];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    vals.push(self.expect_ident("enum value")?.0);
                }
                self.expect(Tok::RBrace)?;
                VarType::Enum(vals)
            }
            _ => unreachable!("caller checked the leading token"),
        };
        let (name, _) = self.expect_ident("variable name")?;
        let array_len = if *self.peek() == Tok::LBracket {
            self.bump();
            let (n, n_loc) = self.expect_int("array length")?;
            self.expect(Tok::RBracket)?;
            if n < 1 {
                return Err(self.error(n_loc, format!("array length must be >= 1, got {n}")));
            }
            Some((n as usize, n_loc))
        } else {
            None
        };
        let init = if *self.peek() == Tok::Assign {
            self.bump();
            if *self.peek() == Tok::LBrace {
                self.bump();
                let mut items = vec![self.parse_literal()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.parse_literal()?);
                }
                self.expect(Tok::RBrace)?;
                Some(items)
            } else {
                Some(vec![self.parse_literal()?])
            }
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(Spanned::new(
            RawDecl {
                name,
                ty,
                array_len,
                init,
            },
            start,
        ))
    }

    fn parse_literal(&mut self) -> Result<Spanned<RawLiteral>, Diagnostic> {
        let loc = self.loc();
        let lit = match self.peek().clone() {
            Tok::Int(_) | Tok::Minus => RawLiteral::Int(self.expect_int("literal")?.0),
            Tok::True => {
                self.bump();
                RawLiteral::Bool(true)
            }
            Tok::False => {
                self.bump();
                RawLiteral::Bool(false)
            }
            Tok::Ident(name) => {
                self.bump();
                RawLiteral::Name(name)
            }
            other => {
                return Err(
                    self.error(loc, format!("expected initializer, found {}", other.describe()))
                )
            }
        };
        Ok(Spanned::new(lit, loc))
    }

    fn parse_proc(&mut self) -> Result<Spanned<ProcDef>, Diagnostic> {
        let start = self.loc();
        self.expect(Tok::Proc)?;
        let (name, _) = self.expect_ident("proc name")?;
        let replicate = if *self.peek() == Tok::Replicate {
            self.bump();
            let (n, n_loc) = self.expect_int("replica count")?;
            if n < 1 {
                return Err(self.error(n_loc, format!("replicate count must be >= 1, got {n}")));
            }
            n as usize
        } else {
            1
        };
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            stmts.push(self.parse_stmt()?);
        }
        let close = self.expect(Tok::RBrace)?;
        if stmts.is_empty() {
            return Err(self.error(close.loc, format!("proc `{name}` has an empty body")));
        }
        Ok(Spanned::new(
            ProcDef {
                name,
                replicate,
                stmts,
            },
            start,
        ))
    }

    fn parse_stmt(&mut self) -> Result<Spanned<Stmt>, Diagnostic> {
        let loc = self.loc();
        let stmt = match self.peek().clone() {
            Tok::Guard => {
                self.bump();
                let cond = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                Stmt::Guard(cond)
            }
            Tok::Assert => {
                self.bump();
                let cond = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                Stmt::Assert(cond)
            }
            Tok::Goto => {
                self.bump();
                let (label, _) = self.expect_ident("label name")?;
                self.expect(Tok::Semi)?;
                Stmt::Goto(label)
            }
            Tok::Ident(name) => {
                if *self.peek2() == Tok::Colon {
                    self.bump();
                    self.bump();
                    Stmt::Label(name)
                } else {
                    let lhs = self.parse_var_ref()?;
                    self.expect(Tok::Assign)?;
                    let rhs = self.parse_expr()?;
                    self.expect(Tok::Semi)?;
                    Stmt::Assign { lhs, rhs }
                }
            }
            other => {
                return Err(
                    self.error(loc, format!("expected statement, found {}", other.describe()))
                )
            }
        };
        Ok(Spanned::new(stmt, loc))
    }

    fn parse_var_ref(&mut self) -> Result<VarRef, Diagnostic> {
        let (name, _) = self.expect_ident("variable")?;
        let index = if *self.peek() == Tok::LBracket {
            self.bump();
            let idx = self.parse_expr()?;
            self.expect(Tok::RBracket)?;
            Some(Box::new(idx))
        } else {
            None
        };
        Ok(VarRef { name, index })
    }

    // Precedence climbing: || < && < (== !=) < (< <= > >=) < (+ -) < * < unary.
    pub fn parse_expr(&mut self) -> Result<Expr, Diagnostic> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_equality()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.parse_equality()?;
            lhs = bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_equality(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_relational()?;
        loop {
            let op = match self.peek() {
                Tok::EqEq => BinOp::Eq,
                Tok::NotEq => BinOp::Ne,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_relational()?;
            lhs = bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_relational(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_additive()?;
        loop {
            let op = match self.peek() {
                Tok::Lt => BinOp::Lt,
                Tok::Le => BinOp::Le,
                Tok::Gt => BinOp::Gt,
                Tok::Ge => BinOp::Ge,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_additive()?;
            lhs = bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_additive(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_multiplicative()?;
            lhs = bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_multiplicative(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Expr::Unary {
                    op: UnOp::Not,
                    expr: Box::new(self.parse_unary()?),
                })
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Unary {
                    op: UnOp::Neg,
                    expr: Box::new(self.parse_unary()?),
                })
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, Diagnostic> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Pid => {
                self.bump();
                Ok(Expr::Pid)
            }
            Tok::Ident(_) => Ok(Expr::Var(self.parse_var_ref()?)),
            Tok::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => {
                Err(self.error(loc, format!("expected expression, found {}", other.describe())))
            }
        }
    }
}

fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::Binary {
        op,
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(src: &str) -> Expr {
        let mut p = Parser::new(src, "t").unwrap();
        p.parse_expr().unwrap()
    }

    #[test]
    fn precedence_binds_mul_over_add_over_cmp() {
        // 1 + 2 * 3 == 7  =>  ((1 + (2*3)) == 7)
        let e = expr("1 + 2 * 3 == 7");
        match e {
            Expr::Binary { op: BinOp::Eq, lhs, .. } => match *lhs {
                Expr::Binary { op: BinOp::Add, rhs, .. } => {
                    assert!(matches!(*rhs, Expr::Binary { op: BinOp::Mul, .. }))
                }
                other => panic!("unexpected lhs {other:?}"),
            },
            other => panic!("unexpected root {other:?}"),
        }
    }

    #[test]
    fn parses_guard_with_disjunction() {
        let src = "proc p { guard flag[1 - _pid] == 0 || turn == 1 - _pid; }";
        let mut p = Parser::new(src, "t").unwrap();
        let prog = p.parse_program().unwrap();
        assert_eq!(prog.procs.len(), 1);
        assert!(matches!(prog.procs[0].node.stmts[0].node, Stmt::Guard(_)));
    }

    #[test]
    fn empty_proc_body_is_a_parse_error() {
        let err = Parser::new("proc p { }", "m.mpl")
            .unwrap()
            .parse_program()
            .unwrap_err();
        assert!(err.message.contains("empty body"), "{err}");
    }

    #[test]
    fn label_requires_colon() {
        let src = "proc p { again: x = 1; goto again; }";
        let mut p = Parser::new(src, "t").unwrap();
        let prog = p.parse_program().unwrap();
        let stmts = &prog.procs[0].node.stmts;
        assert!(matches!(stmts[0].node, Stmt::Label(_)));
        assert!(matches!(stmts[2].node, Stmt::Goto(_)));
    }
}
