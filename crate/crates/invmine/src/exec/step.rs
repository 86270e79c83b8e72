//! Small-step interleaving semantics: one statement per transition,
//! one candidate successor per process.

use thiserror::Error;

use crate::diag::Loc;
use crate::exec::state::{ProgramState, Transition};
use crate::lang::ast::BinOp;
use crate::lang::model::{EExpr, ExecStmt, ProgramModel};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("{file}:{loc}: assignment leaves the domain of `{var}` (value {value}) in state {state}")]
    DomainViolation {
        file: String,
        loc: Loc,
        var: String,
        value: i64,
        state: String,
    },
    #[error("{file}:{loc}: array index {index} out of bounds in state {state}")]
    IndexOutOfBounds {
        file: String,
        loc: Loc,
        index: i64,
        state: String,
    },
}

/// Evaluates an elaborated expression in `state` as process `pid`.
/// Booleans are 0/1.
pub(crate) fn eval_expr(
    model: &ProgramModel,
    state: &ProgramState,
    pid: usize,
    expr: &EExpr,
    loc: Loc,
) -> Result<i64, StepError> {
    match expr {
        EExpr::Const(n) => Ok(*n),
        EExpr::Pid => Ok(pid as i64),
        EExpr::Read { base, len, index, .. } => {
            let offset = match index {
                None => 0,
                Some(idx) => {
                    let v = eval_expr(model, state, pid, idx, loc)?;
                    if v < 0 || v as usize >= *len {
                        return Err(StepError::IndexOutOfBounds {
                            file: model.file.clone(),
                            loc,
                            index: v,
                            state: state.to_string(),
                        });
                    }
                    v as usize
                }
            };
            Ok(state.vals[base + offset])
        }
        EExpr::Neg(e) => Ok(-eval_expr(model, state, pid, e, loc)?),
        EExpr::Not(e) => Ok((eval_expr(model, state, pid, e, loc)? == 0) as i64),
        EExpr::Bin { op, lhs, rhs } => {
            let l = eval_expr(model, state, pid, lhs, loc)?;
            // && and || short-circuit.
            match op {
                BinOp::And => {
                    if l == 0 {
                        return Ok(0);
                    }
                    return eval_expr(model, state, pid, rhs, loc);
                }
                BinOp::Or => {
                    if l != 0 {
                        return Ok(1);
                    }
                    return eval_expr(model, state, pid, rhs, loc);
                }
                _ => {}
            }
            let r = eval_expr(model, state, pid, rhs, loc)?;
            Ok(match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Eq => (l == r) as i64,
                BinOp::Ne => (l != r) as i64,
                BinOp::Lt => (l < r) as i64,
                BinOp::Le => (l <= r) as i64,
                BinOp::Gt => (l > r) as i64,
                BinOp::Ge => (l >= r) as i64,
                BinOp::And | BinOp::Or => unreachable!(),
            })
        }
    }
}

/// Executes the next statement of process `pid`, if it can run.
/// Returns `Ok(None)` when the process is finished or blocked on a
/// false guard.
pub(crate) fn step_process(
    model: &ProgramModel,
    state: &ProgramState,
    pid: usize,
) -> Result<Option<ProgramState>, StepError> {
    let body = model.body(pid);
    let pc = state.pcs[pid] as usize;
    if pc >= body.len() {
        return Ok(None);
    }
    let loc = model.stmt_loc(pid, pc);
    match &body[pc] {
        ExecStmt::Assign { decl, base, len, index, rhs } => {
            let offset = match index {
                None => 0,
                Some(idx) => {
                    let v = eval_expr(model, state, pid, idx, loc)?;
                    if v < 0 || v as usize >= *len {
                        return Err(StepError::IndexOutOfBounds {
                            file: model.file.clone(),
                            loc,
                            index: v,
                            state: state.to_string(),
                        });
                    }
                    v as usize
                }
            };
            let value = eval_expr(model, state, pid, rhs, loc)?;
            let d = &model.decls[*decl];
            let (lo, hi) = d.ty.bounds();
            if value < lo || value > hi {
                return Err(StepError::DomainViolation {
                    file: model.file.clone(),
                    loc,
                    var: d.name.clone(),
                    value,
                    state: state.to_string(),
                });
            }
            let mut next = state.clone();
            next.vals[base + offset] = value;
            next.pcs[pid] = (pc + 1) as u16;
            Ok(Some(next))
        }
        ExecStmt::Guard(cond) => {
            if eval_expr(model, state, pid, cond, loc)? != 0 {
                let mut next = state.clone();
                next.pcs[pid] = (pc + 1) as u16;
                Ok(Some(next))
            } else {
                Ok(None)
            }
        }
        ExecStmt::Goto(target) => {
            let mut next = state.clone();
            next.pcs[pid] = *target as u16;
            Ok(Some(next))
        }
        // Assertions are recorded by the parser but execute as skips;
        // they are never consumed by the learner.
        ExecStmt::Assert(_) => {
            let mut next = state.clone();
            next.pcs[pid] = (pc + 1) as u16;
            Ok(Some(next))
        }
    }
}

/// All transitions enabled in `state`, in ascending process order.
/// Blocked and finished processes contribute nothing.
pub fn enabled_transitions(
    model: &ProgramModel,
    state: &ProgramState,
) -> Result<Vec<Transition>, StepError> {
    let mut out = Vec::new();
    for pid in 0..model.process_count() {
        if let Some(dst) = step_process(model, state, pid)? {
            out.push(Transition {
                src: state.clone(),
                dst,
                pid,
                stmt: state.pcs[pid] as usize,
            });
        }
    }
    Ok(out)
}
