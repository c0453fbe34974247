//! Signatures, terms, finite algebras given by operation tables, and the
//! Maltsev axiom checker.

mod algebra;
pub mod library;
mod term;

use alloc::string::String;

pub use algebra::{
    check_maltsev_axioms, eval_term, is_homomorphism, CompiledTerm, Elem, FiniteAlgebra, HomCounterexample, HomReport,
    MaltsevAxiom, MaltsevCounterexample, MaltsevReport, Operation, Signature,
};
pub(crate) use algebra::{check_map_shape, first_hom_failure};
pub use term::{SyntaxError, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("invalid operation name {0:?}")]
    InvalidOperationName(String),
    #[error("duplicate operation {0:?}")]
    DuplicateOperation(String),
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("carrier size {0} does not fit the element type")]
    CarrierTooLarge(usize),
    #[error("expected {expected} tables, found {found}")]
    TableCount { expected: usize, found: usize },
    #[error("table for {0:?} is too large to index")]
    TableTooLarge(String),
    #[error("table for {op:?} has length {found}, expected {expected}")]
    TableLength { op: String, expected: usize, found: usize },
    #[error("table for {op:?} has entry {value} at flat index {index}, outside carrier of size {carrier}")]
    TableEntry { op: String, index: usize, value: Elem, carrier: usize },
    #[error("unknown operation {0:?}")]
    UnknownOperation(String),
    #[error("operation {op:?} takes {expected} arguments, found {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("variable v{index} out of range for environment of length {env_len}")]
    VarOutOfRange { index: usize, env_len: usize },
    #[error("element {value} outside carrier of size {carrier}")]
    ElementOutOfRange { value: Elem, carrier: usize },
    #[error("term {term} violates {axiom} at a={a}, b={b}")]
    MaltsevAxiom { term: String, a: Elem, b: Elem, axiom: MaltsevAxiom },
    #[error("algebras {left:?} and {right:?} have different signatures")]
    SignatureMismatch { left: String, right: String },
    #[error("map has length {found}, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("map sends {index} to {value}, outside carrier of size {carrier}")]
    MapEntry { index: usize, value: Elem, carrier: usize },
}
