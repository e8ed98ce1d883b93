//! Finite metric samples standing in for compact metric spaces.
//!
//! A [`MetricGround`] is a finite point set with a full distance table and a
//! claimed density: every point of the idealized space it samples lies within
//! `density` of some ground point. Loaded data sets are treated as the space
//! itself and default to density 0.

mod generators;
mod io;
mod warsaw;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use generators::{
    CantorSet, Circle, CustomPoints, Interval, SpaceGenerator, SpaceParams, SpaceRegistry,
    SpaceSpec, TwoPoints, WarsawCircle,
};
pub use io::{load_ground, write_coords_csv, write_distmatrix_csv, GroundFormat};
pub use warsaw::{warsaw_closing_arc, warsaw_graph_point};

/// Grounds up to this size get an exhaustive triangle-inequality check.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 512;

/// Number of random triples checked for larger grounds.
pub const SAMPLED_TRIANGLE_CHECKS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("unknown space kind `{0}`")]
    UnknownKind(String),
    #[error("sample count must be positive, got {0}")]
    NonPositiveSamples(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("asymmetric distance matrix: d({i},{j}) = {dij} but d({j},{i}) = {dji}")]
    Asymmetric {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },
    #[error("negative or non-finite distance d({i},{j}) = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("non-zero self distance d({i},{i}) = {value}")]
    NonZeroDiagonal { i: usize, value: f64 },
    #[error("triangle inequality violated for ({i},{j},{k}): d({i},{k}) = {dik} > d({i},{j}) + d({j},{k}) = {via}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        dik: f64,
        via: f64,
    },
    #[error("empty ground set")]
    Empty,
}

/// A finite metric sample with its distance table.
#[derive(Clone, Debug)]
pub struct MetricGround {
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<f64>,
    len: usize,
    density: f64,
}

impl MetricGround {
    /// Builds a ground from coordinates with the Euclidean metric.
    pub fn from_coords(coords: Vec<Vec<f64>>, density: f64) -> Result<Self, MetricError> {
        if coords.is_empty() {
            return Err(MetricError::Empty);
        }
        let dim = coords[0].len();
        for (i, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::Parse {
                    line: i + 1,
                    message: format!("point {i} has {} coordinates, expected {dim}", p.len()),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(MetricError::Parse {
                    line: i + 1,
                    message: format!("point {i} has a non-finite coordinate"),
                });
            }
        }
        check_density(density)?;
        let len = coords.len();
        let mut dist = vec![0.0; len * len];
        dist.par_chunks_mut(len).enumerate().for_each(|(i, row)| {
            for (j, d) in row.iter_mut().enumerate() {
                *d = euclidean(&coords[i], &coords[j]);
            }
        });
        Ok(Self {
            coords: Some(coords),
            dist,
            len,
            density,
        })
    }

    /// Builds a ground from an explicit distance matrix, validating that it
    /// is a metric.
    pub fn from_distance_matrix(rows: Vec<Vec<f64>>, density: f64) -> Result<Self, MetricError> {
        let len = rows.len();
        if len == 0 {
            return Err(MetricError::Empty);
        }
        check_density(density)?;
        for (row, r) in rows.iter().enumerate() {
            if r.len() != len {
                return Err(MetricError::NotSquare {
                    row,
                    found: r.len(),
                    expected: len,
                });
            }
        }
        for i in 0..len {
            if rows[i][i] != 0.0 {
                return Err(MetricError::NonZeroDiagonal {
                    i,
                    value: rows[i][i],
                });
            }
            for j in 0..len {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(MetricError::NegativeDistance { i, j, value: v });
                }
            }
        }
        for i in 0..len {
            for j in (i + 1)..len {
                if rows[i][j] != rows[j][i] {
                    return Err(MetricError::Asymmetric {
                        i,
                        j,
                        dij: rows[i][j],
                        dji: rows[j][i],
                    });
                }
            }
        }
        let dist = rows.into_iter().flatten().collect();
        let ground = Self {
            coords: None,
            dist,
            len,
            density,
        };
        ground.check_triangle_inequality(0)?;
        Ok(ground)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len + j]
    }

    /// Distances from point `i` to every ground point.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.len..(i + 1) * self.len]
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn with_density(mut self, density: f64) -> Result<Self, MetricError> {
        check_density(density)?;
        self.density = density;
        Ok(self)
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Largest distance between two ground points.
    pub fn diameter(&self) -> f64 {
        self.dist.par_iter().cloned().reduce(|| 0.0, f64::max)
    }

    /// Distance from ground point `x` to the nearest point of `set`.
    pub fn distance_to_set(&self, x: usize, set: &[usize]) -> f64 {
        let row = self.row(x);
        set.iter().map(|&a| row[a]).fold(f64::INFINITY, f64::min)
    }

    /// Diameter of a subset of ground points (0 for singletons and the empty set).
    pub fn set_diameter(&self, set: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (k, &a) in set.iter().enumerate() {
            let row = self.row(a);
            for &b in &set[k + 1..] {
                best = best.max(row[b]);
            }
        }
        best
    }

    /// Diameter of the union of two subsets without materializing it.
    pub fn union_diameter(&self, left: &[usize], right: &[usize]) -> f64 {
        let mut best = self.set_diameter(left).max(self.set_diameter(right));
        for &a in left {
            let row = self.row(a);
            for &b in right {
                best = best.max(row[b]);
            }
        }
        best
    }

    /// Largest distance from a ground point to its nearest other ground point.
    pub fn max_nearest_neighbor_distance(&self) -> f64 {
        if self.len < 2 {
            return 0.0;
        }
        (0..self.len)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &d)| d)
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Checks the triangle inequality: exhaustively up to
    /// [`EXHAUSTIVE_TRIANGLE_LIMIT`] points, on [`SAMPLED_TRIANGLE_CHECKS`]
    /// random triples drawn from `seed` above that.
    ///
    /// A relative slack of `1e-12` times the diameter absorbs rounding in
    /// distances computed from coordinates.
    pub fn check_triangle_inequality(&self, seed: u64) -> Result<(), MetricError> {
        let slack = 1e-12 * self.diameter().max(f64::MIN_POSITIVE);
        let n = self.len;
        let violation = |i: usize, j: usize, k: usize| -> Option<MetricError> {
            let dik = self.dist(i, k);
            let via = self.dist(i, j) + self.dist(j, k);
            (dik > via + slack).then_some(MetricError::TriangleViolation { i, j, k, dik, via })
        };
        if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
            let found = (0..n).into_par_iter().find_map_first(|i| {
                for k in (i + 1)..n {
                    for j in 0..n {
                        if j == i || j == k {
                            continue;
                        }
                        if let Some(err) = violation(i, j, k) {
                            return Some(err);
                        }
                    }
                }
                None
            });
            return found.map_or(Ok(()), Err);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_TRIANGLE_CHECKS {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let k = rng.gen_range(0..n);
            if let Some(err) = violation(i, j, k) {
                return Err(err);
            }
        }
        Ok(())
    }
}

fn check_density(density: f64) -> Result<(), MetricError> {
    if !density.is_finite() || density < 0.0 {
        return Err(MetricError::InvalidParameter {
            name: "density",
            reason: format!("must be finite and non-negative, got {density}"),
        });
    }
    Ok(())
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
