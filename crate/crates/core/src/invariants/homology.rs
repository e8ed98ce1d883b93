//! Homology with coefficients in the two-element field.
//!
//! `H_0` comes from union-find over the edges. Higher boundary matrices are
//! reduced column by column (sparse columns as sorted row lists, addition is
//! symmetric difference), from the top dimension down so that columns already
//! known to be paired are cleared without work.
//!
//! Cycle representatives: for `H_1`, the fundamental cycle of every positive
//! edge (one closing a loop in the spanning forest of earlier edges) that is
//! not the pivot of a reduced 2-boundary; for `H_k`, `k >= 2`, the reduction
//! record of every zero column whose simplex is not such a pivot.

use rayon::prelude::*;

use super::{InvariantError, SimplicialComplex};
use crate::UnionFind;

const NONE: u32 = u32::MAX;

/// Adds `other` to `col` over the two-element field; both are sorted.
pub(crate) fn add_column(col: &mut Vec<u32>, other: &[u32]) {
    let mut out = Vec::with_capacity(col.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&col[i..]);
    out.extend_from_slice(&other[j..]);
    *col = out;
}

/// Reduces a sorted sparse vector of parity-counted indices to a set.
pub(crate) fn parity_set(mut entries: Vec<u32>) -> Vec<u32> {
    entries.sort_unstable();
    let mut out = Vec::with_capacity(entries.len());
    let mut k = 0;
    while k < entries.len() {
        let mut run = 1;
        while k + run < entries.len() && entries[k + run] == entries[k] {
            run += 1;
        }
        if run % 2 == 1 {
            out.push(entries[k]);
        }
        k += run;
    }
    out
}

/// Reduced boundary matrix of one dimension, with a pivot lookup.
#[derive(Clone, Debug, Default)]
pub struct ReducedBoundary {
    /// Non-zero reduced columns (sorted rows); `pivot_of_row[r]` is the column
    /// whose lowest entry is `r`.
    columns: Vec<Vec<u32>>,
    pivot_of_row: Vec<u32>,
    /// Rank of the boundary map.
    rank: usize,
}

impl ReducedBoundary {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether row `r` is the lowest entry of a reduced column.
    pub fn is_pivot(&self, r: usize) -> bool {
        self.pivot_of_row.get(r).is_some_and(|&c| c != NONE)
    }

    /// Reduces `chain` modulo the column space; returns the remainder.
    pub fn reduce(&self, mut chain: Vec<u32>) -> Vec<u32> {
        while let Some(&low) = chain.last() {
            match self.pivot_of_row.get(low as usize) {
                Some(&c) if c != NONE => add_column(&mut chain, &self.columns[c as usize]),
                _ => break,
            }
        }
        chain
    }
}

/// Output of reducing one boundary matrix.
struct Reduction {
    boundary: ReducedBoundary,
    /// For each zero column that was not cleared, its column index and the
    /// recorded combination of original columns (a cycle).
    cycles: Vec<(u32, Vec<u32>)>,
}

/// Reduces `∂_d` of `complex`. Columns listed in `cleared` are known to
/// reduce to zero and are skipped. With `track_cycles`, zero columns keep the
/// combination of original columns that produced them.
fn reduce_boundary(
    complex: &SimplicialComplex,
    d: usize,
    cleared: Option<&ReducedBoundary>,
    track_cycles: bool,
) -> Reduction {
    let rows = complex.count(d - 1);
    let cols = complex.count(d);
    let raw: Vec<Vec<u32>> = (0..cols)
        .into_par_iter()
        .map(|j| {
            if cleared.is_some_and(|c| c.is_pivot(j)) {
                Vec::new()
            } else {
                complex.boundary(d, j)
            }
        })
        .collect();
    let mut pivot_of_row = vec![NONE; rows];
    let mut columns: Vec<Vec<u32>> = Vec::new();
    let mut records: Vec<Vec<u32>> = Vec::new();
    let mut cycles = Vec::new();
    for (j, mut col) in raw.into_iter().enumerate() {
        let skipped = col.is_empty();
        let mut record = if track_cycles && !skipped {
            vec![j as u32]
        } else {
            Vec::new()
        };
        while let Some(&low) = col.last() {
            let c = pivot_of_row[low as usize];
            if c == NONE {
                break;
            }
            add_column(&mut col, &columns[c as usize]);
            if track_cycles {
                add_column(&mut record, &records[c as usize]);
            }
        }
        match col.last() {
            Some(&low) => {
                pivot_of_row[low as usize] = columns.len() as u32;
                columns.push(col);
                records.push(record);
            }
            None => {
                if track_cycles && !skipped {
                    cycles.push((j as u32, record));
                }
            }
        }
    }
    let rank = columns.len();
    Reduction {
        boundary: ReducedBoundary {
            columns,
            pivot_of_row,
            rank,
        },
        cycles,
    }
}

/// Homology of a complex through a maximal degree, with cycle
/// representatives of a basis in every positive degree.
#[derive(Clone, Debug)]
pub struct Homology {
    betti: Vec<usize>,
    /// Component label of every vertex.
    component: Vec<u32>,
    /// `bases[k]`: representative cycles (sorted simplex indices) of a basis
    /// of `H_k`; empty for `k = 0`.
    bases: Vec<Vec<Vec<u32>>>,
    /// `boundaries[k]`: reduced `∂_{k+1}`, for `1 <= k <= max_degree`.
    boundaries: Vec<ReducedBoundary>,
}

impl Homology {
    pub fn betti(&self) -> &[usize] {
        &self.betti
    }

    pub fn max_degree(&self) -> usize {
        self.betti.len() - 1
    }

    pub fn component_of(&self, vertex: usize) -> u32 {
        self.component[vertex]
    }

    /// Basis cycle representatives of `H_k` (`k >= 1`).
    pub fn basis(&self, k: usize) -> &[Vec<u32>] {
        &self.bases[k]
    }

    /// Reduced `∂_{k+1}`, used to test whether a `k`-cycle is a boundary.
    pub fn boundary(&self, k: usize) -> &ReducedBoundary {
        &self.boundaries[k]
    }
}

/// Betti numbers `b_0 ..= b_{max_degree}` over the two-element field.
pub fn betti(complex: &SimplicialComplex, max_degree: usize) -> Result<Vec<usize>, InvariantError> {
    Ok(homology(complex, max_degree)?.betti)
}

/// Homology through `max_degree`; the complex must carry simplices up to
/// dimension `max_degree + 1`.
pub fn homology(
    complex: &SimplicialComplex,
    max_degree: usize,
) -> Result<Homology, InvariantError> {
    if complex.max_dim() < max_degree + 1 {
        return Err(InvariantError::DimensionCap {
            needed: max_degree + 1,
            available: complex.max_dim(),
        });
    }
    let nv = complex.vertex_count();

    // Degree 0 and the spanning forest for degree 1.
    let mut uf = UnionFind::new(nv);
    let ne = complex.count(1);
    let mut positive = Vec::new();
    let mut forest: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nv];
    for e in 0..ne {
        let s = complex.simplex(1, e);
        let (a, b) = (s[0] as usize, s[1] as usize);
        if uf.union(a, b) {
            forest[a].push((b as u32, e as u32));
            forest[b].push((a as u32, e as u32));
        } else {
            positive.push(e as u32);
        }
    }
    let mut labels = vec![NONE; nv];
    let mut next = 0u32;
    let component: Vec<u32> = (0..nv)
        .map(|v| {
            let root = uf.find(v);
            if labels[root] == NONE {
                labels[root] = next;
                next += 1;
            }
            labels[root]
        })
        .collect();
    let b0 = next as usize;

    // Reduce from the top dimension down, clearing paired columns.
    let top = max_degree + 1;
    let mut reduced: Vec<Option<Reduction>> = (0..=top).map(|_| None).collect();
    for d in (2..=top).rev() {
        let cleared = reduced
            .get(d + 1)
            .and_then(|r| r.as_ref())
            .map(|r| &r.boundary);
        let track = d <= max_degree;
        reduced[d] = Some(reduce_boundary(complex, d, cleared, track));
    }

    let mut betti = vec![b0];
    let mut bases = vec![Vec::new()];
    let mut boundaries = vec![ReducedBoundary::default()];
    for k in 1..=max_degree {
        let next_boundary = reduced[k + 1]
            .as_ref()
            .expect("reduced above")
            .boundary
            .clone();
        let basis: Vec<Vec<u32>> = if k == 1 {
            let tree = RootedForest::new(&forest);
            positive
                .iter()
                .filter(|&&e| !next_boundary.is_pivot(e as usize))
                .map(|&e| {
                    let s = complex.simplex(1, e as usize);
                    let mut cycle = tree.path_edges(s[0] as usize, s[1] as usize);
                    cycle.push(e);
                    cycle.sort_unstable();
                    cycle
                })
                .collect()
        } else {
            reduced[k]
                .as_ref()
                .expect("reduced above")
                .cycles
                .iter()
                .filter(|(j, _)| !next_boundary.is_pivot(*j as usize))
                .map(|(_, record)| record.clone())
                .collect()
        };
        let cycles_dim = if k == 1 {
            positive.len()
        } else {
            complex.count(k) - reduced[k].as_ref().expect("reduced above").boundary.rank()
        };
        betti.push(cycles_dim - next_boundary.rank());
        debug_assert_eq!(basis.len(), cycles_dim - next_boundary.rank());
        bases.push(basis);
        boundaries.push(next_boundary);
    }
    Ok(Homology {
        betti,
        component,
        bases,
        boundaries,
    })
}

/// Spanning forest rooted by breadth-first search, for tree paths.
struct RootedForest {
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
    depth: Vec<u32>,
}

impl RootedForest {
    fn new(adjacency: &[Vec<(u32, u32)>]) -> Self {
        let n = adjacency.len();
        let mut parent = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        let mut depth = vec![0u32; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                for &(w, e) in &adjacency[v] {
                    let w = w as usize;
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = v as u32;
                        parent_edge[w] = e;
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        Self {
            parent,
            parent_edge,
            depth,
        }
    }

    /// Edges of the tree path between two vertices of one component.
    fn path_edges(&self, mut a: usize, mut b: usize) -> Vec<u32> {
        let mut out = Vec::new();
        while self.depth[a] > self.depth[b] {
            out.push(self.parent_edge[a]);
            a = self.parent[a] as usize;
        }
        while self.depth[b] > self.depth[a] {
            out.push(self.parent_edge[b]);
            b = self.parent[b] as usize;
        }
        while a != b {
            out.push(self.parent_edge[a]);
            out.push(self.parent_edge[b]);
            a = self.parent[a] as usize;
            b = self.parent[b] as usize;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_graph(n: u32) -> SimplicialComplex {
        SimplicialComplex::from_simplices(n as usize, (0..n).map(|i| vec![i, (i + 1) % n]), 2)
            .unwrap()
    }

    #[test]
    fn single_vertex() {
        let c = SimplicialComplex::from_simplices(1, vec![vec![0]], 2).unwrap();
        assert_eq!(betti(&c, 1).unwrap(), vec![1, 0]);
    }

    #[test]
    fn four_cycle() {
        let c = cycle_graph(4);
        let h = homology(&c, 1).unwrap();
        assert_eq!(h.betti(), &[1, 1]);
        assert_eq!(h.basis(1), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn filled_triangle_and_hollow_tetrahedron() {
        let c = SimplicialComplex::from_simplices(3, vec![vec![0, 1, 2]], 2).unwrap();
        assert_eq!(betti(&c, 1).unwrap(), vec![1, 0]);
        let sphere = SimplicialComplex::from_simplices(
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            3,
        )
        .unwrap();
        let h = homology(&sphere, 2).unwrap();
        assert_eq!(h.betti(), &[1, 0, 1]);
        assert_eq!(h.basis(2), &[vec![0, 1, 2, 3]]);
        let ball = SimplicialComplex::from_simplices(4, vec![vec![0, 1, 2, 3]], 3).unwrap();
        assert_eq!(betti(&ball, 2).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn two_circles_and_a_point() {
        let mut simplices: Vec<Vec<u32>> = (0..3).map(|i| vec![i, (i + 1) % 3]).collect();
        simplices.extend((0..4).map(|i| vec![3 + i, 3 + (i + 1) % 4]));
        let c = SimplicialComplex::from_simplices(8, simplices, 2).unwrap();
        let h = homology(&c, 1).unwrap();
        assert_eq!(h.betti(), &[3, 2]);
        assert_eq!(h.component_of(0), h.component_of(2));
        assert_ne!(h.component_of(0), h.component_of(7));
    }

    #[test]
    fn needs_one_dimension_above_the_degree() {
        let c = SimplicialComplex::from_simplices(2, vec![vec![0, 1]], 1).unwrap();
        assert!(matches!(
            homology(&c, 1),
            Err(InvariantError::DimensionCap {
                needed: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn column_arithmetic() {
        let mut a = vec![1, 3, 5];
        add_column(&mut a, &[3, 4]);
        assert_eq!(a, vec![1, 4, 5]);
        assert_eq!(parity_set(vec![5, 1, 5, 2, 1, 1]), vec![1, 2]);
    }
}
