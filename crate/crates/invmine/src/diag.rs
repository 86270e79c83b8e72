//! Source diagnostics for the modeling language front end.

use std::fmt;

use thiserror::Error;

/// A point in the source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub fn new(line: u32, col: u32) -> Self {
        Loc { line, col }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A front-end error with its source location. Renders as
/// `file:line:col: message`.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{file}:{loc}: {message}")]
pub struct Diagnostic {
    pub file: String,
    pub loc: Loc,
    pub message: String,
}

impl Diagnostic {
    pub fn new(file: impl Into<String>, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            file: file.into(),
            loc,
            message: message.into(),
        }
    }
}

/// Wraps a value with the location it came from. Equality and hashing
/// ignore the location so that structural comparison of parsed models
/// is position-independent.
#[derive(Debug, Clone, Copy)]
pub struct Spanned<T> {
    pub node: T,
    pub loc: Loc,
}

impl<T> Spanned<T> {
    pub fn new(node: T, loc: Loc) -> Self {
        Spanned { node, loc }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T: Eq> Eq for Spanned<T> {}
