//! Homology of the hyperlevel posets over the two-element field.
//!
//! Each hyperlevel becomes its order complex (chains of the poset); bonding
//! maps are monotone, so they act simplicially on these complexes and induce
//! linear maps on homology whose ranks are the observable shape invariants.
//! Rips complexes of the nets give an independent cross-check.

mod complex;
mod export;
mod homology;
mod induced;
mod report;

use thiserror::Error;

pub use complex::{colex, order_complex, rips_complex, SimplicialComplex};
pub use export::{complex_csv, complex_off, element_barycentres};
pub use homology::{betti, homology, Homology, ReducedBoundary};
pub use induced::{chain_map_matrix, induced_rank, poset_vertex_map, Gf2Matrix};
pub use report::{
    shape_report, shape_report_for_tower, HomologyReport, LevelHomology, PairRanks, ShapeOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("simplex budget of {budget} exceeded at dimension {dim}")]
    SimplexBudget { budget: usize, dim: usize },
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("vertex map has {found} entries, expected {expected}")]
    VertexMapLength { expected: usize, found: usize },
    #[error("image simplex {simplex:?} is missing from the target complex")]
    MissingSimplex { simplex: Vec<u32> },
    #[error("map is not monotone: element {smaller} lies below {larger} but its image does not")]
    NotMonotone { smaller: usize, larger: usize },
    #[error("degree needs simplices of dimension {needed}, complex is capped at {available}")]
    DimensionCap { needed: usize, available: usize },
    #[error("cannot multiply: left has {left_cols} columns, right has {right_rows} rows")]
    ShapeMismatch { left_cols: usize, right_rows: usize },
    #[error("a homology report needs at least two levels, got {depth}")]
    DepthTooSmall { depth: usize },
    #[error("stabilization window must cover at least two levels, got {window}")]
    WindowTooSmall { window: usize },
}
