//! Canonical source emission. `parse_model(to_source(m))` is
//! structurally equal to `m`.

use std::fmt::Write;

use crate::lang::ast::*;
use crate::lang::model::ProgramModel;

pub fn to_source(model: &ProgramModel) -> String {
    let mut out = String::new();
    for decl in &model.decls {
        write_decl(&mut out, decl);
    }
    for proc in &model.procs {
        out.push('\n');
        write_proc(&mut out, proc);
    }
    out
}

fn write_decl(out: &mut String, decl: &VarDecl) {
    let ty = match &decl.ty {
        VarType::Bool => "bool".to_string(),
        VarType::Byte => "byte".to_string(),
        VarType::Int { lo, hi } => format!("int[{lo}..{hi}]"),
        VarType::Enum(vals) => format!("enum {{ {} }}", vals.join(", ")),
    };
    let _ = write!(out, "{ty} {}", decl.name);
    if let Some(len) = decl.array_len {
        let _ = write!(out, "[{len}]");
    }
    let lit = |v: i64| -> String {
        match &decl.ty {
            VarType::Enum(vals) => vals[v as usize].clone(),
            VarType::Bool => (if v == 0 { "false" } else { "true" }).to_string(),
            _ => v.to_string(),
        }
    };
    if decl.array_len.is_some() {
        let items: Vec<String> = decl.init.iter().map(|&v| lit(v)).collect();
        let _ = write!(out, " = {{{}}}", items.join(", "));
    } else {
        let _ = write!(out, " = {}", lit(decl.init[0]));
    }
    out.push_str(";\n");
}

fn write_proc(out: &mut String, proc: &ProcDef) {
    let _ = write!(out, "proc {}", proc.name);
    if proc.replicate > 1 {
        let _ = write!(out, " replicate {}", proc.replicate);
    }
    out.push_str(" {\n");
    for stmt in &proc.stmts {
        match &stmt.node {
            Stmt::Label(name) => {
                let _ = writeln!(out, "{name}:");
            }
            Stmt::Assign { lhs, rhs } => {
                let _ = writeln!(out, "    {} = {};", var_ref(lhs), expr(rhs, 0));
            }
            Stmt::Guard(cond) => {
                let _ = writeln!(out, "    guard {};", expr(cond, 0));
            }
            Stmt::Goto(label) => {
                let _ = writeln!(out, "    goto {label};");
            }
            Stmt::Assert(cond) => {
                let _ = writeln!(out, "    assert {};", expr(cond, 0));
            }
        }
    }
    out.push_str("}\n");
}

fn var_ref(v: &VarRef) -> String {
    match &v.index {
        None => v.name.clone(),
        Some(idx) => format!("{}[{}]", v.name, expr(idx, 0)),
    }
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul => 6,
    }
}

/// Precedence-aware rendering; parenthesizes only where reparsing
/// would otherwise change the tree shape.
fn expr(e: &Expr, min_prec: u8) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Pid => "_pid".to_string(),
        Expr::Var(v) => var_ref(v),
        Expr::Unary { op, expr: inner } => {
            let glyph = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            };
            format!("{glyph}{}", expr(inner, 7))
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = prec(*op);
            // Left-associative chains: the right operand needs one more level.
            let s = format!("{} {} {}", expr(lhs, p), op.glyph(), expr(rhs, p + 1));
            if p < min_prec {
                format!("({s})")
            } else {
                s
            }
        }
    }
}
