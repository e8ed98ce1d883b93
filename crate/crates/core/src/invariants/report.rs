//! Betti numbers per level and ranks of the maps induced by bonding maps.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{homology, induced_rank, order_complex, poset_vertex_map, InvariantError};
use crate::construction::AdjustedSequence;
use crate::tower::{Tower, TowerOptions};
use crate::Result;

/// Knobs of [`shape_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOptions {
    /// Highest homology degree computed (1 or 2).
    pub max_degree: usize,
    /// Number of trailing levels whose induced ranks are minimized.
    pub window: usize,
    /// Maximum number of simplices per order complex.
    pub simplex_budget: usize,
}

impl ShapeOptions {
    pub const DEFAULT_WINDOW: usize = 2;
    pub const DEFAULT_SIMPLEX_BUDGET: usize = 20_000_000;
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self {
            max_degree: 1,
            window: Self::DEFAULT_WINDOW,
            simplex_budget: Self::DEFAULT_SIMPLEX_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelHomology {
    pub n: usize,
    pub betti: Vec<usize>,
    /// Simplex counts of the order complex per dimension.
    pub simplex_counts: Vec<usize>,
}

/// Ranks of `H_k(level fine) -> H_k(level coarse)` for `coarse = fine - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRanks {
    pub fine: usize,
    pub coarse: usize,
    pub ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomologyReport {
    pub max_degree: usize,
    pub window: usize,
    pub levels: Vec<LevelHomology>,
    pub pairs: Vec<PairRanks>,
    /// Minimum induced rank per degree over the pairs inside the window.
    pub stabilized: Vec<usize>,
}

impl HomologyReport {
    /// CSV `n,b0,b1,rank0_to_prev,rank1_to_prev` (with `b2` and
    /// `rank2_to_prev` appended when degree 2 is computed). The first level
    /// has empty rank fields.
    pub fn to_csv(&self) -> String {
        let degrees = 0..=self.max_degree;
        let mut header: Vec<String> = degrees.clone().map(|k| format!("b{k}")).collect();
        header.extend(degrees.clone().map(|k| format!("rank{k}_to_prev")));
        let mut out = format!("n,{}\n", header.join(","));
        for level in &self.levels {
            let mut fields: Vec<String> = level.betti.iter().map(usize::to_string).collect();
            match self.pairs.iter().find(|p| p.fine == level.n) {
                Some(pair) => fields.extend(pair.ranks.iter().map(usize::to_string)),
                None => fields.extend(degrees.clone().map(|_| String::new())),
            }
            let _ = writeln!(out, "{},{}", level.n, fields.join(","));
        }
        out
    }

    /// Human-readable multi-line summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "homology over Z/2 through degree {}", self.max_degree);
        for level in &self.levels {
            let _ = writeln!(
                out,
                "level {}: betti {:?}, simplices {:?}",
                level.n, level.betti, level.simplex_counts
            );
        }
        for pair in &self.pairs {
            let _ = writeln!(
                out,
                "map {} -> {}: ranks {:?}",
                pair.fine, pair.coarse, pair.ranks
            );
        }
        let _ = writeln!(
            out,
            "stabilized ranks over the last {} levels: {:?}",
            self.window, self.stabilized
        );
        out
    }
}

/// Builds the tower of `seq` and reports its homology.
pub fn shape_report(
    seq: &AdjustedSequence,
    tower_options: &TowerOptions,
    options: &ShapeOptions,
) -> Result<HomologyReport> {
    let tower = Tower::build(seq, tower_options)?;
    shape_report_for_tower(&tower, options)
}

/// Homology of every order complex of `tower`, the ranks induced by each
/// bonding map and their minimum over the trailing window.
pub fn shape_report_for_tower(tower: &Tower, options: &ShapeOptions) -> Result<HomologyReport> {
    let depth = tower.depth();
    if depth < 2 {
        return Err(InvariantError::DepthTooSmall { depth }.into());
    }
    if options.window < 2 {
        return Err(InvariantError::WindowTooSmall {
            window: options.window,
        }
        .into());
    }
    let max_degree = options.max_degree;
    let complexes = tower
        .hyperlevels()
        .par_iter()
        .map(|h| order_complex(h, max_degree + 1, options.simplex_budget))
        .collect::<Result<Vec<_>, _>>()?;
    let homologies = complexes
        .par_iter()
        .map(|c| homology(c, max_degree))
        .collect::<Result<Vec<_>, _>>()?;
    let levels = complexes
        .iter()
        .zip(&homologies)
        .enumerate()
        .map(|(i, (c, h))| LevelHomology {
            n: i + 1,
            betti: h.betti().to_vec(),
            simplex_counts: c.counts(),
        })
        .collect();
    let pairs = (0..depth - 1)
        .into_par_iter()
        .map(|i| {
            let (fine, coarse) = (&tower.hyperlevels()[i + 1], &tower.hyperlevels()[i]);
            let vertex_map = poset_vertex_map(fine, tower.vertex_map(i + 2), coarse)?;
            let ranks = (0..=max_degree)
                .map(|k| {
                    induced_rank(
                        &complexes[i + 1],
                        &homologies[i + 1],
                        &complexes[i],
                        &homologies[i],
                        &vertex_map,
                        k,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PairRanks {
                fine: i + 2,
                coarse: i + 1,
                ranks,
            })
        })
        .collect::<Result<Vec<_>, InvariantError>>()?;
    let window = options.window.min(depth);
    let trailing = &pairs[pairs.len() + 1 - window..];
    let stabilized = (0..=max_degree)
        .map(|k| trailing.iter().map(|p| p.ranks[k]).min().unwrap_or(0))
        .collect();
    Ok(HomologyReport {
        max_degree,
        window: options.window,
        levels,
        pairs,
        stabilized,
    })
}
