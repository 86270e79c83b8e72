//! Static checking and elaboration of a parsed program into a
//! validated [`ProgramModel`].

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::diag::{Diagnostic, Loc};
use crate::lang::ast::*;
use crate::lang::parser::{Parser, RawDecl, RawLiteral, RawProgram};

/// Index into the canonical slot table of a model: program counters
/// first (one per process), then user variables in declaration order,
/// arrays element by element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(pub usize);

/// Type class used for atom compatibility. `byte` and ranged `int`
/// are interchangeable numerics; enums only compare against values of
/// the same declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotClass {
    Bool,
    Num,
    Enum { decl: usize },
    Pc,
}

#[derive(Debug, Clone)]
pub struct SlotInfo {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub class: SlotClass,
    /// Value names for enum slots, `None` otherwise.
    pub enum_values: Option<Vec<String>>,
}

impl SlotInfo {
    pub fn domain_size(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Canonical flattening of a model's state: one slot per program
/// counter, then one per user variable element.
#[derive(Debug, Clone)]
pub struct VarLayout {
    slots: Vec<SlotInfo>,
    pc_count: usize,
    by_name: HashMap<String, usize>,
}

impl VarLayout {
    pub fn slots(&self) -> &[SlotInfo] {
        &self.slots
    }

    pub fn slot(&self, id: SlotId) -> &SlotInfo {
        &self.slots[id.0]
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Number of leading slots that are program counters.
    pub fn pc_count(&self) -> usize {
        self.pc_count
    }

    pub fn is_pc(&self, id: SlotId) -> bool {
        id.0 < self.pc_count
    }

    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> + '_ {
        (0..self.slots.len()).map(SlotId)
    }

    /// All non-pc slots, in canonical order.
    pub fn data_slot_ids(&self) -> impl Iterator<Item = SlotId> + '_ {
        (self.pc_count..self.slots.len()).map(SlotId)
    }

    /// Resolves a slot by its canonical name, e.g. `turn`, `flag[1]`,
    /// or `_pc[0]`.
    pub fn lookup(&self, name: &str) -> Option<SlotId> {
        self.by_name.get(name).copied().map(SlotId)
    }

    /// Resolves every element slot of a declared variable name, e.g.
    /// `flag` yields `flag[0]` and `flag[1]`.
    pub fn lookup_var(&self, name: &str) -> Vec<SlotId> {
        if let Some(id) = self.lookup(name) {
            return vec![id];
        }
        let prefix = format!("{name}[");
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.name.starts_with(&prefix))
            .map(|(i, _)| SlotId(i))
            .collect()
    }
}

/// Elaborated expression with resolved variable references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EExpr {
    Const(i64),
    Pid,
    /// Reads element `index` (scalar: 0) of the declaration rooted at
    /// `base` in the flattened user-value vector.
    Read {
        decl: usize,
        base: usize,
        len: usize,
        index: Option<Box<EExpr>>,
    },
    Neg(Box<EExpr>),
    Not(Box<EExpr>),
    Bin {
        op: BinOp,
        lhs: Box<EExpr>,
        rhs: Box<EExpr>,
    },
}

/// One executable statement. Labels are resolved away: `Goto` holds
/// the target statement index directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecStmt {
    Assign {
        decl: usize,
        base: usize,
        len: usize,
        index: Option<EExpr>,
        rhs: EExpr,
    },
    Guard(EExpr),
    Goto(usize),
    Assert(EExpr),
}

/// A validated concurrent program: declarations, process definitions,
/// compiled bodies, and the canonical state layout.
#[derive(Debug, Clone)]
pub struct ProgramModel {
    pub file: String,
    pub decls: Vec<VarDecl>,
    pub procs: Vec<ProcDef>,
    /// One entry per process instance; the value is the proc definition index.
    instances: Vec<usize>,
    /// Compiled executable body per proc definition.
    bodies: Vec<Vec<ExecStmt>>,
    /// Source location per executable statement, for runtime errors.
    body_locs: Vec<Vec<Loc>>,
    layout: VarLayout,
}

impl PartialEq for ProgramModel {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls && self.procs == other.procs
    }
}

impl ProgramModel {
    /// Number of process instances (after `replicate` expansion).
    pub fn process_count(&self) -> usize {
        self.instances.len()
    }

    pub fn layout(&self) -> &VarLayout {
        &self.layout
    }

    /// Compiled body of the process with the given pid.
    pub fn body(&self, pid: usize) -> &[ExecStmt] {
        &self.bodies[self.instances[pid]]
    }

    pub fn stmt_loc(&self, pid: usize, stmt: usize) -> Loc {
        self.body_locs[self.instances[pid]][stmt]
    }

    /// Flattened initial values of the user variables, declaration order.
    pub fn initial_vals(&self) -> Vec<i64> {
        self.decls.iter().flat_map(|d| d.init.iter().copied()).collect()
    }

    /// Total number of syntactically possible states: the product of
    /// every slot's domain size (pc slots included).
    pub fn state_space_size(&self) -> BigUint {
        let mut product = BigUint::from(1u32);
        for slot in self.layout.slots() {
            product *= BigUint::from(slot.domain_size());
        }
        product
    }
}

/// Parses and validates a model source. `file` labels diagnostics.
pub fn parse_model(src: &str, file: &str) -> Result<ProgramModel, Diagnostic> {
    let raw = Parser::new(src, file)?.parse_program()?;
    elaborate(raw, file)
}

struct Checker<'a> {
    file: &'a str,
    decls: Vec<VarDecl>,
    decl_index: HashMap<String, usize>,
    decl_base: Vec<usize>,
    enum_values: HashMap<String, (usize, i64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Num,
    Enum(usize),
}

impl<'a> Checker<'a> {
    fn error(&self, loc: Loc, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(self.file, loc, message)
    }

    fn add_decl(&mut self, raw: &RawDecl, loc: Loc) -> Result<(), Diagnostic> {
        if self.decl_index.contains_key(&raw.name) || self.enum_values.contains_key(&raw.name) {
            return Err(self.error(loc, format!("duplicate declaration of `{}`", raw.name)));
        }
        if raw.name.starts_with('_') {
            return Err(self.error(
                loc,
                format!("name `{}` is reserved (identifiers may not start with `_`)", raw.name),
            ));
        }
        let idx = self.decls.len();
        if let VarType::Enum(vals) = &raw.ty {
            for (i, v) in vals.iter().enumerate() {
                if self.enum_values.contains_key(v) || self.decl_index.contains_key(v) {
                    return Err(self.error(loc, format!("duplicate declaration of `{v}`")));
                }
                if vals[..i].contains(v) {
                    return Err(self.error(loc, format!("duplicate enum value `{v}`")));
                }
                self.enum_values.insert(v.clone(), (idx, i as i64));
            }
        }
        let count = raw.array_len.map(|(n, _)| n).unwrap_or(1);
        let (lo, hi) = raw.ty.bounds();
        let init = match &raw.init {
            None => vec![lo.max(0).min(hi); count],
            Some(items) => {
                if items.len() != count {
                    return Err(self.error(
                        items[0].loc,
                        format!(
                            "initializer for `{}` has {} values, expected {}",
                            raw.name,
                            items.len(),
                            count
                        ),
                    ));
                }
                let mut vals = Vec::with_capacity(count);
                for item in items {
                    let v = self.resolve_literal(&item.node, &raw.ty, idx, item.loc)?;
                    if v < lo || v > hi {
                        return Err(self.error(
                            item.loc,
                            format!("initial value {v} outside the domain [{lo}..{hi}] of `{}`", raw.name),
                        ));
                    }
                    vals.push(v);
                }
                vals
            }
        };
        let base = self.decl_base.last().copied().unwrap_or(0)
            + self.decls.last().map(|d| d.element_count()).unwrap_or(0);
        self.decl_base.push(base);
        self.decl_index.insert(raw.name.clone(), idx);
        self.decls.push(VarDecl {
            name: raw.name.clone(),
            ty: raw.ty.clone(),
            array_len: raw.array_len.map(|(n, _)| n),
            init,
        });
        Ok(())
    }

    fn resolve_literal(
        &self,
        lit: &RawLiteral,
        ty: &VarType,
        decl: usize,
        loc: Loc,
    ) -> Result<i64, Diagnostic> {
        match lit {
            RawLiteral::Int(n) => {
                if matches!(ty, VarType::Enum(_)) {
                    return Err(self.error(loc, "enum variables take value names, not integers"));
                }
                Ok(*n)
            }
            RawLiteral::Bool(b) => Ok(*b as i64),
            RawLiteral::Name(name) => match self.enum_values.get(name) {
                Some((owner, v)) if *owner == decl => Ok(*v),
                Some(_) => Err(self.error(
                    loc,
                    format!("enum value `{name}` belongs to a different declaration"),
                )),
                None => Err(self.error(loc, format!("unknown enum value `{name}`"))),
            },
        }
    }

    fn check_expr(&self, expr: &Expr, loc: Loc, in_proc: bool) -> Result<(EExpr, Ty), Diagnostic> {
        match expr {
            Expr::Int(n) => Ok((EExpr::Const(*n), Ty::Num)),
            Expr::Bool(b) => Ok((EExpr::Const(*b as i64), Ty::Bool)),
            Expr::Pid => {
                if !in_proc {
                    return Err(self.error(loc, "`_pid` is only valid inside a proc body"));
                }
                Ok((EExpr::Pid, Ty::Num))
            }
            Expr::Var(vref) => self.check_var_read(vref, loc, in_proc),
            Expr::Unary { op, expr: inner } => {
                let (e, ty) = self.check_expr(inner, loc, in_proc)?;
                match op {
                    UnOp::Neg => {
                        self.require_numeric(ty, loc, "unary `-`")?;
                        Ok((EExpr::Neg(Box::new(e)), Ty::Num))
                    }
                    UnOp::Not => {
                        if ty != Ty::Bool {
                            return Err(self.error(loc, "`!` requires a boolean operand"));
                        }
                        Ok((EExpr::Not(Box::new(e)), Ty::Bool))
                    }
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let (le, lt) = self.check_expr(lhs, loc, in_proc)?;
                let (re, rt) = self.check_expr(rhs, loc, in_proc)?;
                let out_ty = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        self.require_numeric(lt, loc, op.glyph())?;
                        self.require_numeric(rt, loc, op.glyph())?;
                        Ty::Num
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        self.require_numeric(lt, loc, op.glyph())?;
                        self.require_numeric(rt, loc, op.glyph())?;
                        Ty::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        match (lt, rt) {
                            (Ty::Enum(a), Ty::Enum(b)) if a == b => {}
                            (Ty::Enum(_), _) | (_, Ty::Enum(_)) => {
                                return Err(self.error(
                                    loc,
                                    format!("`{}` compares incompatible types", op.glyph()),
                                ))
                            }
                            _ => {}
                        }
                        Ty::Bool
                    }
                    BinOp::And | BinOp::Or => {
                        if lt != Ty::Bool || rt != Ty::Bool {
                            return Err(self.error(
                                loc,
                                format!("`{}` requires boolean operands", op.glyph()),
                            ));
                        }
                        Ty::Bool
                    }
                };
                Ok((
                    EExpr::Bin {
                        op: *op,
                        lhs: Box::new(le),
                        rhs: Box::new(re),
                    },
                    out_ty,
                ))
            }
        }
    }

    fn require_numeric(&self, ty: Ty, loc: Loc, what: &str) -> Result<(), Diagnostic> {
        match ty {
            Ty::Num | Ty::Bool => Ok(()),
            Ty::Enum(_) => Err(self.error(loc, format!("{what} cannot be applied to enum values"))),
        }
    }

    fn check_var_read(
        &self,
        vref: &VarRef,
        loc: Loc,
        in_proc: bool,
    ) -> Result<(EExpr, Ty), Diagnostic> {
        if let Some((decl, v)) = self.enum_values.get(&vref.name) {
            if vref.index.is_some() {
                return Err(self.error(loc, format!("enum value `{}` cannot be indexed", vref.name)));
            }
            return Ok((EExpr::Const(*v), Ty::Enum(*decl)));
        }
        let decl_idx = *self
            .decl_index
            .get(&vref.name)
            .ok_or_else(|| self.error(loc, format!("unknown variable `{}`", vref.name)))?;
        let decl = &self.decls[decl_idx];
        let index = match (&vref.index, decl.array_len) {
            (None, None) => None,
            (None, Some(_)) => {
                return Err(self.error(
                    loc,
                    format!("array `{}` must be indexed", vref.name),
                ))
            }
            (Some(_), None) => {
                return Err(self.error(
                    loc,
                    format!("`{}` is not an array", vref.name),
                ))
            }
            (Some(idx_expr), Some(len)) => {
                let (e, ty) = self.check_expr(idx_expr, loc, in_proc)?;
                self.require_numeric(ty, loc, "array index")?;
                if let EExpr::Const(c) = e {
                    if c < 0 || c as usize >= len {
                        return Err(self.error(
                            loc,
                            format!("index {c} out of bounds for `{}[{len}]`", vref.name),
                        ));
                    }
                }
                Some(Box::new(e))
            }
        };
        let ty = match &decl.ty {
            VarType::Bool => Ty::Bool,
            VarType::Byte | VarType::Int { .. } => Ty::Num,
            VarType::Enum(_) => Ty::Enum(decl_idx),
        };
        Ok((
            EExpr::Read {
                decl: decl_idx,
                base: self.decl_base[decl_idx],
                len: decl.element_count(),
                index,
            },
            ty,
        ))
    }

    fn compile_body(&self, def: &ProcDef, loc: Loc) -> Result<(Vec<ExecStmt>, Vec<Loc>), Diagnostic> {
        // First pass: map labels to the index of the next executable statement.
        let mut labels: HashMap<&str, usize> = HashMap::new();
        let mut exec_index = 0usize;
        for stmt in &def.stmts {
            match &stmt.node {
                Stmt::Label(name) => {
                    if labels.insert(name, exec_index).is_some() {
                        return Err(self.error(stmt.loc, format!("duplicate label `{name}`")));
                    }
                }
                _ => exec_index += 1,
            }
        }
        if exec_index == 0 {
            return Err(self.error(loc, format!("proc `{}` has an empty body", def.name)));
        }

        let mut body = Vec::with_capacity(exec_index);
        let mut locs = Vec::with_capacity(exec_index);
        for stmt in &def.stmts {
            let compiled = match &stmt.node {
                Stmt::Label(_) => continue,
                Stmt::Assign { lhs, rhs } => self.compile_assign(lhs, rhs, stmt.loc)?,
                Stmt::Guard(cond) => {
                    let (e, ty) = self.check_expr(cond, stmt.loc, true)?;
                    if ty != Ty::Bool {
                        return Err(self.error(stmt.loc, "guard condition must be boolean"));
                    }
                    ExecStmt::Guard(e)
                }
                Stmt::Assert(cond) => {
                    let (e, ty) = self.check_expr(cond, stmt.loc, true)?;
                    if ty != Ty::Bool {
                        return Err(self.error(stmt.loc, "assert condition must be boolean"));
                    }
                    ExecStmt::Assert(e)
                }
                Stmt::Goto(target) => match labels.get(target.as_str()) {
                    Some(&idx) => ExecStmt::Goto(idx),
                    None => {
                        return Err(
                            self.error(stmt.loc, format!("unresolved goto label `{target}`"))
                        )
                    }
                },
            };
            body.push(compiled);
            locs.push(stmt.loc);
        }
        Ok((body, locs))
    }

    fn compile_assign(&self, lhs: &VarRef, rhs: &Expr, loc: Loc) -> Result<ExecStmt, Diagnostic> {
        if self.enum_values.contains_key(&lhs.name) {
            return Err(self.error(loc, format!("cannot assign to enum value `{}`", lhs.name)));
        }
        let decl_idx = *self
            .decl_index
            .get(&lhs.name)
            .ok_or_else(|| self.error(loc, format!("unknown variable `{}`", lhs.name)))?;
        let decl = &self.decls[decl_idx];
        let index = match (&lhs.index, decl.array_len) {
            (None, None) => None,
            (None, Some(_)) => {
                return Err(self.error(loc, format!("array `{}` must be indexed", lhs.name)))
            }
            (Some(_), None) => {
                return Err(self.error(loc, format!("`{}` is not an array", lhs.name)))
            }
            (Some(idx_expr), Some(len)) => {
                let (e, ty) = self.check_expr(idx_expr, loc, true)?;
                self.require_numeric(ty, loc, "array index")?;
                if let EExpr::Const(c) = e {
                    if c < 0 || c as usize >= len {
                        return Err(self.error(
                            loc,
                            format!("index {c} out of bounds for `{}[{len}]`", lhs.name),
                        ));
                    }
                }
                Some(e)
            }
        };
        let (rhs_e, rhs_ty) = self.check_expr(rhs, loc, true)?;
        match (&decl.ty, rhs_ty) {
            (VarType::Enum(_), Ty::Enum(owner)) if owner == decl_idx => {}
            (VarType::Enum(_), _) => {
                return Err(self.error(
                    loc,
                    format!("type mismatch assigning to enum variable `{}`", lhs.name),
                ))
            }
            (_, Ty::Enum(_)) => {
                return Err(self.error(
                    loc,
                    format!("type mismatch assigning enum value to `{}`", lhs.name),
                ))
            }
            _ => {}
        }
        Ok(ExecStmt::Assign {
            decl: decl_idx,
            base: self.decl_base[decl_idx],
            len: decl.element_count(),
            index,
            rhs: rhs_e,
        })
    }
}

fn elaborate(raw: RawProgram, file: &str) -> Result<ProgramModel, Diagnostic> {
    let mut checker = Checker {
        file,
        decls: Vec::new(),
        decl_index: HashMap::new(),
        decl_base: Vec::new(),
        enum_values: HashMap::new(),
    };
    for decl in &raw.decls {
        checker.add_decl(&decl.node, decl.loc)?;
    }

    let mut proc_names: HashMap<&str, ()> = HashMap::new();
    let mut bodies = Vec::new();
    let mut body_locs = Vec::new();
    let mut instances = Vec::new();
    let mut procs = Vec::new();
    for (def_idx, def) in raw.procs.iter().enumerate() {
        if proc_names.insert(def.node.name.as_str(), ()).is_some() {
            return Err(checker.error(def.loc, format!("duplicate proc name `{}`", def.node.name)));
        }
        let (body, locs) = checker.compile_body(&def.node, def.loc)?;
        bodies.push(body);
        body_locs.push(locs);
        for _ in 0..def.node.replicate {
            instances.push(def_idx);
        }
        procs.push(def.node.clone());
    }

    // Canonical layout: pc slots first, then user variables.
    let mut slots = Vec::new();
    let mut by_name = HashMap::new();
    for (pid, &def_idx) in instances.iter().enumerate() {
        let name = format!("_pc[{pid}]");
        by_name.insert(name.clone(), slots.len());
        slots.push(SlotInfo {
            name,
            lo: 0,
            hi: bodies[def_idx].len() as i64,
            class: SlotClass::Pc,
            enum_values: None,
        });
    }
    let pc_count = slots.len();
    for (decl_idx, decl) in checker.decls.iter().enumerate() {
        let (lo, hi) = decl.ty.bounds();
        let class = match &decl.ty {
            VarType::Bool => SlotClass::Bool,
            VarType::Byte | VarType::Int { .. } => SlotClass::Num,
            VarType::Enum(_) => SlotClass::Enum { decl: decl_idx },
        };
        let enum_values = match &decl.ty {
            VarType::Enum(vals) => Some(vals.clone()),
            _ => None,
        };
        match decl.array_len {
            None => {
                by_name.insert(decl.name.clone(), slots.len());
                slots.push(SlotInfo {
                    name: decl.name.clone(),
                    lo,
                    hi,
                    class,
                    enum_values,
                });
            }
            Some(len) => {
                for i in 0..len {
                    let name = format!("{}[{i}]", decl.name);
                    by_name.insert(name.clone(), slots.len());
                    slots.push(SlotInfo {
                        name,
                        lo,
                        hi,
                        class,
                        enum_values: enum_values.clone(),
                    });
                }
            }
        }
    }

    Ok(ProgramModel {
        file: file.to_string(),
        decls: checker.decls,
        procs,
        instances,
        bodies,
        body_locs,
        layout: VarLayout {
            slots,
            pc_count,
            by_name,
        },
    })
}
