//! Atoms, Boolean formulas, signatures, and classifier metrics.

pub mod ast;
pub mod atom;
pub mod sig;
pub mod text;

pub use ast::{Connective, Formula};
pub use atom::{
    instantiate_atoms, parse_template_file, Atom, AtomError, AtomTemplate, CmpOp,
};
pub use sig::{
    compose, precision, precision_of_signature, recall, recall_of_signature, signature_bitwise,
    signature_direct, ExampleSets, MetricError, Signature, SignatureCache,
};
pub use text::{atom_text, parse_formula, to_text, FormulaParseError};
