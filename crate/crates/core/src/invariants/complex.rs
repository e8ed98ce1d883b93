//! Simplicial complexes stored per dimension in colexicographic order.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::InvariantError;
use crate::construction::Level;
use crate::hyperspace::HyperLevel;
use crate::metric::MetricGround;

/// Colexicographic comparison of sorted vertex tuples of equal length.
pub fn colex(a: &[u32], b: &[u32]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// A finite simplicial complex up to a dimension cap.
///
/// Simplices of dimension `d` are sorted vertex tuples stored back to back in
/// one flat vector, ordered colexicographically, so a simplex is addressed by
/// its position in that order and faces are found by binary search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<u32>>,
    /// Whether simplices above the cap exist in the complex being described.
    truncated: bool,
}

impl SimplicialComplex {
    /// Builds a complex from arbitrary simplices, adding every face and
    /// dropping duplicates. Simplices above `max_dim` are discarded and mark
    /// the complex as truncated.
    pub fn from_simplices(
        vertex_count: usize,
        simplices: impl IntoIterator<Item = Vec<u32>>,
        max_dim: usize,
    ) -> Result<Self, InvariantError> {
        let mut by_dim: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_dim + 1];
        let mut truncated = false;
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            if let Some(&v) = s.iter().find(|&&v| v as usize >= vertex_count) {
                return Err(InvariantError::VertexOutOfRange {
                    vertex: v as usize,
                    count: vertex_count,
                });
            }
            if s.len() > max_dim + 1 {
                truncated = true;
            }
            let k = s.len().min(max_dim + 1);
            for mask in 1u64..(1u64 << s.len()) {
                let ones = mask.count_ones() as usize;
                if ones > k {
                    continue;
                }
                let face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                by_dim[ones - 1].push(face);
            }
        }
        for v in 0..vertex_count as u32 {
            by_dim[0].push(vec![v]);
        }
        Ok(Self::from_sorted_lists(vertex_count, by_dim, truncated))
    }

    /// `lists[d]` holds sorted `d`-simplices, possibly repeated and unordered;
    /// they are assumed to be face-closed.
    fn from_sorted_lists(vertex_count: usize, lists: Vec<Vec<Vec<u32>>>, truncated: bool) -> Self {
        let simplices = lists
            .into_iter()
            .map(|mut list| {
                list.par_sort_unstable_by(|a, b| colex(a, b));
                list.dedup();
                list.into_iter().flatten().collect()
            })
            .collect();
        Self {
            vertex_count,
            simplices,
            truncated,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Dimension cap the complex was built with.
    pub fn max_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Whether the described complex has simplices above the cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Number of `d`-simplices (0 above the cap).
    pub fn count(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, |flat| flat.len() / (d + 1))
    }

    /// Simplex counts for every dimension up to the cap.
    pub fn counts(&self) -> Vec<usize> {
        (0..self.simplices.len()).map(|d| self.count(d)).collect()
    }

    pub fn simplex(&self, d: usize, index: usize) -> &[u32] {
        &self.simplices[d][index * (d + 1)..(index + 1) * (d + 1)]
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &[u32]> + '_ {
        self.simplices
            .get(d)
            .map(|flat| flat.chunks_exact(d + 1))
            .into_iter()
            .flatten()
    }

    /// Position of a sorted `d`-simplex, if present.
    pub fn index_of(&self, simplex: &[u32]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        let flat = self.simplices.get(d)?;
        let count = flat.len() / (d + 1);
        let (mut lo, mut hi) = (0, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match colex(&flat[mid * (d + 1)..(mid + 1) * (d + 1)], simplex) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Indices of the codimension-one faces of the `d`-simplex at `index`,
    /// sorted ascending.
    pub fn boundary(&self, d: usize, index: usize) -> Vec<u32> {
        let s = self.simplex(d, index);
        let mut face = Vec::with_capacity(d);
        let mut out: Vec<u32> = (0..=d)
            .map(|skip| {
                face.clear();
                face.extend(
                    s.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &v)| v),
                );
                self.index_of(&face).expect("complex is closed under faces") as u32
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Alternating sum of simplex counts through the cap.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Simplices that are not a face of another simplex within the cap.
    pub fn facets(&self) -> Vec<Vec<u32>> {
        let top = self.max_dim();
        let mut covered: Vec<Vec<bool>> = (0..=top).map(|d| vec![false; self.count(d)]).collect();
        for d in 1..=top {
            for i in 0..self.count(d) {
                for f in self.boundary(d, i) {
                    covered[d - 1][f as usize] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (d, flags) in covered.iter().enumerate() {
            for (i, &c) in flags.iter().enumerate() {
                if !c {
                    out.push(self.simplex(d, i).to_vec());
                }
            }
        }
        out
    }
}

/// Order complex of a hyperlevel: vertices are element ids and `k`-simplices
/// are chains `C_0 ⊊ ... ⊊ C_k`, up to dimension `max_dim`.
pub fn order_complex(
    level: &HyperLevel,
    max_dim: usize,
    budget: usize,
) -> Result<SimplicialComplex, InvariantError> {
    let n = level.len();
    let below: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|id| level.proper_subsets(id))
        .collect();
    let max_card = level.elements().iter().map(Vec::len).max().unwrap_or(0);
    let truncated = max_card > max_dim + 1;

    let mut lists: Vec<Vec<Vec<u32>>> = Vec::with_capacity(max_dim + 1);
    lists.push((0..n as u32).map(|v| vec![v]).collect());
    let mut total = n;
    // chains of length d + 1, each stored bottom to top (ascending ids)
    for d in 1..=max_dim {
        let prev = &lists[d - 1];
        let next: Vec<Vec<u32>> = prev
            .par_iter()
            .flat_map_iter(|chain| {
                // extend below the bottom element
                let bottom = chain[0] as usize;
                below[bottom].iter().map(move |&b| {
                    let mut grown = Vec::with_capacity(chain.len() + 1);
                    grown.push(b);
                    grown.extend_from_slice(chain);
                    grown
                })
            })
            .collect();
        total += next.len();
        if total > budget {
            return Err(InvariantError::SimplexBudget { budget, dim: d });
        }
        if next.is_empty() {
            break;
        }
        lists.push(next);
    }
    while lists.len() < max_dim + 1 {
        lists.push(Vec::new());
    }
    Ok(SimplicialComplex::from_sorted_lists(n, lists, truncated))
}

/// Vietoris–Rips complex of a level: vertices are positions in the net and
/// simplices are subsets of diameter below `2 epsilon`, up to `max_dim`.
pub fn rips_complex(
    ground: &MetricGround,
    level: &Level,
    max_dim: usize,
    budget: usize,
) -> Result<SimplicialComplex, InvariantError> {
    let net = &level.net;
    let m = net.len();
    let bound = 2.0 * level.epsilon;
    let higher: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let row = ground.row(net[i]);
            ((i + 1)..m)
                .filter(|&j| row[net[j]] < bound)
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    let higher = &higher;
    let mut lists: Vec<Vec<Vec<u32>>> = vec![(0..m as u32).map(|v| vec![v]).collect()];
    let mut frontier: Vec<(Vec<u32>, Vec<u32>)> = (0..m)
        .map(|i| (vec![i as u32], higher[i].clone()))
        .collect();
    let mut total = m;
    let mut truncated = false;
    for d in 1..=max_dim + 1 {
        let next: Vec<(Vec<u32>, Vec<u32>)> = frontier
            .par_iter()
            .flat_map_iter(|(clique, candidates)| {
                candidates.iter().map(move |&j| {
                    let mut grown = clique.clone();
                    grown.push(j);
                    (grown, intersect(candidates, &higher[j as usize]))
                })
            })
            .collect();
        if d > max_dim {
            truncated = !next.is_empty();
            break;
        }
        total += next.len();
        if total > budget {
            return Err(InvariantError::SimplexBudget { budget, dim: d });
        }
        lists.push(next.iter().map(|(c, _)| c.clone()).collect());
        frontier = next;
    }
    while lists.len() < max_dim + 1 {
        lists.push(Vec::new());
    }
    Ok(SimplicialComplex::from_sorted_lists(m, lists, truncated))
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
