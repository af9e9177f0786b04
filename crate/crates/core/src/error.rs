//! Error types shared across the crate.

use thiserror::Error;

use crate::types::SimpleType;

/// Errors from checked term construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("symbol {symbol} declared with arity {arity} but its type has only {arrows} arrows")]
    ArityExceedsType {
        symbol: String,
        arity: usize,
        arrows: usize,
    },
    #[error("symbol {symbol} expects {expected} arguments, got {got}")]
    WrongArgumentCount {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {index} of {symbol} has type {actual}, expected {expected}")]
    ArgumentTypeMismatch {
        symbol: String,
        index: usize,
        expected: SimpleType,
        actual: SimpleType,
    },
    #[error("cannot apply a term of base type {ty}")]
    NotAFunction { ty: SimpleType },
    #[error("applied a term of type {actual} where {expected} is required")]
    ApplicationTypeMismatch {
        expected: SimpleType,
        actual: SimpleType,
    },
    #[error("substitution binds {variable} : {expected} to a term of type {actual}")]
    SubstitutionTypeMismatch {
        variable: String,
        expected: SimpleType,
        actual: SimpleType,
    },
}

/// Errors from type-order queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeOrderError {
    #[error("unknown base type {0}")]
    UnknownBase(String),
}

/// Reduction-graph enumeration exceeded its node budget.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("beta-eta reduct enumeration exceeded the cap of {cap} terms")]
pub struct ReductCapExceeded {
    pub cap: usize,
}
