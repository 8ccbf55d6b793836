//! Exact-arithmetic engine for Hilbert-Blumenthal local models over finite
//! chain rings.
//!
//! The ambient object is the module `M = (O_R)^2` where
//! `O_R = R[w]/(m(w))[pi]/(pi^e - p*u)` is a finite quotient of the ring of
//! integers of a degree-`g` field, built over a finite chain ring
//! `R` (one of `Z/p^n`, `F_p`, `F_p[eps]`).  Points of the local model `N(R)`
//! are `O_R`-stable rank-`g` direct summands of `M`; the crate enumerates
//! them exhaustively, decides the isotropy condition (DP), the Kottwitz
//! determinant condition (K) and the rank-one condition (R) exactly, and
//! packages named theorem checks into deterministic reports.

pub mod cli;
pub mod conditions;
pub mod enumerate;
pub mod forms;
pub mod lattices;
pub mod linalg;
pub mod literal;
pub mod poly;
pub mod rings;
pub mod verify;

/// Errors shared across the engine.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("minimal polynomial is reducible mod p")]
    ReducibleMinPoly,
    #[error("unsupported parameter combination: {0}")]
    UnsupportedCombination(String),
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error("elements live at different ring levels")]
    LevelMismatch,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("wild ramification: e is not invertible in the base")]
    WildRamification,
    #[error("lattice is not stable under the O-action")]
    NotInvariant,
    #[error("lattice is not a point of N")]
    NotAPoint,
    #[error("lattice is not a graph over the requested chart")]
    NotInChart,
    #[error("invalid chart type: {0}")]
    BadType(String),
    #[error("matrices in the action family do not commute")]
    NonCommutingFamily,
    #[error("enumeration budget exceeded: {candidates} candidates > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
