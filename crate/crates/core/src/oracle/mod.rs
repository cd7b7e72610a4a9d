//! Brute-force concrete semantics over bounded Herbrand universes, used to
//! check the abstract operators and the engine on small instances.

pub mod checks;
pub mod concrete;
mod flat;
pub mod lattice;
pub mod random;
pub mod sld;
pub mod suite;
pub mod universe;

use thiserror::Error;

use crate::absub::DomainError;
use crate::engine::EngineError;

pub use checks::{check_coherence, check_mono_safety, check_poly, find_violation, Counterexample, PolyFailure};
pub use concrete::{cunify, unify_one};
pub use universe::{enumerate_subs, ConcreteSet, Universe};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("the signature has no constant, so there are no ground terms")]
    NoConstant,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
