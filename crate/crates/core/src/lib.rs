//! Finite hyperspace approximations of compact metric spaces.
//!
//! A compact metric space is represented by a dense finite sample
//! ([`metric::MetricGround`]). From it the crate builds an adjusted sequence of
//! finite nets with shrinking radii ([`construction`]), the finite posets of
//! small-diameter subsets of each net together with nearest-point and bonding
//! maps ([`hyperspace`]), union-map homotopy witnesses between multivalued maps
//! ([`homotopy`]) and Z/2 homology of the resulting order complexes, including
//! the ranks of the maps induced by the bonding maps ([`invariants`]).
//!
//! Interchangeable pieces (space generators, net strategies and verification
//! checks) live behind traits and are registered by name so the command line
//! and config files can select them at runtime.

pub mod checks;
pub mod config;
pub mod construction;
pub mod homotopy;
pub mod hyperspace;
pub mod invariants;
pub mod metric;
pub mod pipeline;
pub mod tower;

mod error;
mod fmt;
mod union_find;

pub use error::{Error, Result};
pub use fmt::format_real;
pub use union_find::UnionFind;
