//! Termination proving for higher-order rewrite systems on βη-normal
//! forms via a computability path order with accessible subterms and
//! small symbols.
//!
//! The crate is organized bottom-up:
//! - [`types`], [`term`], [`normalize`]: simply-typed lambda terms with
//!   applied function symbols and βη-normalization;
//! - [`typeorder`]: the admissible order on simple types and position
//!   sets;
//! - [`problem`], [`thf`]: rewrite problems and the TPTP-THF frontend;
//! - [`params`], [`structure`]: order parameters, nonversatility and the
//!   basic/accessible subterm relations;
//! - [`order`], [`trace`]: the path-order inference engine and proof
//!   traces;
//! - [`smt`], [`enumerate`], [`prove`]: parameter search via SMT-script
//!   generation or exhaustive enumeration;
//! - [`gen`]: random generation of problems and substitutions for
//!   differential testing.

pub mod error;
pub mod types;
pub mod term;
pub mod normalize;
pub mod typeorder;
pub mod problem;
pub mod thf;
pub mod params;
pub mod structure;
pub mod trace;
pub mod order;
pub mod smt;
pub mod enumerate;
pub mod prove;
pub mod gen;

pub use error::{ReductCapExceeded, TermError, TypeOrderError};
pub use problem::{Problem, Rule};
pub use term::{FreshVars, Substitution, Symbol, Term};
pub use types::SimpleType;
