//! Surface syntax tree for the modeling language.

use crate::diag::Spanned;

/// Declared variable type. `int` always carries an explicit inclusive
/// range so every model has a finite state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarType {
    Bool,
    Byte,
    Int { lo: i64, hi: i64 },
    Enum(Vec<String>),
}

impl VarType {
    /// Inclusive value bounds of the type.
    pub fn bounds(&self) -> (i64, i64) {
        match self {
            VarType::Bool => (0, 1),
            VarType::Byte => (0, 255),
            VarType::Int { lo, hi } => (*lo, *hi),
            VarType::Enum(vals) => (0, vals.len() as i64 - 1),
        }
    }

    pub fn domain_size(&self) -> u64 {
        let (lo, hi) = self.bounds();
        (hi - lo + 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
    /// `None` for scalars, `Some(len)` for fixed-size arrays.
    pub array_len: Option<usize>,
    /// Resolved initial value per element (length 1 for scalars).
    pub init: Vec<i64>,
}

impl VarDecl {
    pub fn element_count(&self) -> usize {
        self.array_len.unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn glyph(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// A variable occurrence, optionally subscripted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRef {
    pub name: String,
    pub index: Option<Box<Expr>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Pid,
    Var(VarRef),
    Unary { op: UnOp, expr: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Label(String),
    Assign { lhs: VarRef, rhs: Expr },
    /// Blocks the process until the condition evaluates true.
    Guard(Expr),
    Goto(String),
    /// Parsed and kept, but executes as a skip.
    Assert(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcDef {
    pub name: String,
    pub replicate: usize,
    pub stmts: Vec<Spanned<Stmt>>,
}
