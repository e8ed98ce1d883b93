//! Homotopies between multivalued maps, certified by union maps.
//!
//! Two maps `f, g` into a finite hyperlevel are joined by the homotopy that
//! holds `f`, passes through `x -> f(x) ∪ g(x)` and ends at `g`. It stays in
//! `U_b` exactly when every union has diameter below `b`, so a
//! [`HomotopyWitness`] records those diameters and nothing else.

mod finite_type;
mod identity;
mod witness;

use thiserror::Error;

use crate::hyperspace::HyperspaceError;

pub use finite_type::{finite_type_convert, ApproximativeMap};
pub use identity::{
    check_diagram_commutes, check_identity_morphism, BoundReport, IdentityMorphismReport,
    IdentityViolation,
};
pub use witness::{check_homotopic_in_u, HomotopyWitness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("maps have different domains ({left} and {right} items)")]
    DomainMismatch { left: usize, right: usize },
    #[error("net {n} is not {beta}-dense: it covers the target only within {gamma}")]
    NotDense { n: usize, gamma: f64, beta: f64 },
    #[error("betas must be positive and strictly decreasing; index {n} breaks this")]
    BetasNotDecreasing { n: usize },
    #[error("{maps} maps, {betas} betas and {nets} nets do not line up")]
    LengthMismatch {
        maps: usize,
        betas: usize,
        nets: usize,
    },
    #[error("level {n} is not available in a sequence of depth {depth}")]
    LevelOutOfRange { n: usize, depth: usize },
    #[error(transparent)]
    Hyperspace(#[from] HyperspaceError),
}
