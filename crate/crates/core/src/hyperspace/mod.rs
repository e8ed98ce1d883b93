//! Finite hyperspaces `U_{2 epsilon}(A)` with the upper semifinite topology.
//!
//! On a finite set of subsets the upper semifinite topology has the down-sets
//! of the inclusion order as open sets, so a [`HyperLevel`] is just a poset
//! and a map between hyperlevels is continuous exactly when it is monotone.

mod export;
mod lemma;
mod level;
mod maps;

use thiserror::Error;

pub use export::{poset_csv, poset_dot};
pub use lemma::{verify_lemma1, ClauseReport, Lemma1Report, LemmaClause, LemmaViolation};
pub use level::{is_subset, HyperLevel, HyperOptions};
pub(crate) use maps::argmax;
pub use maps::{
    bonding_map, composite_bonding, element_ids, is_continuous, nearest_point_map, tie_tolerance,
    union_map, union_of, Continuity, MapDomain, MultiMap,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperspaceError {
    #[error("element budget of {budget} exceeded while enumerating subsets of cardinality {cardinality}")]
    ElementBudget { budget: usize, cardinality: usize },
    #[error("point {point} is not in the net of level {level}")]
    NotInNet { level: usize, point: usize },
    #[error("set {set:?} has diameter {diameter} >= {bound} at level {level}")]
    DiameterTooLarge {
        level: usize,
        set: Vec<usize>,
        diameter: f64,
        bound: f64,
    },
    #[error("set {set:?} is not an element of hyperlevel {level}")]
    MissingElement { level: usize, set: Vec<usize> },
    #[error("image of item {item} is empty")]
    EmptyImage { item: usize },
    #[error("image of item {item} names point {point} outside the target")]
    TargetOutOfRange { item: usize, point: usize },
    #[error("net is empty")]
    EmptyNet,
    #[error("domain mismatch: expected {expected} items, found {found}")]
    DomainMismatch { expected: usize, found: usize },
    #[error("composite needs at least one level")]
    EmptyChain,
    #[error("a chain of {levels} levels needs {} bonding maps, got {maps}", .levels.saturating_sub(1))]
    ChainLength { levels: usize, maps: usize },
}
