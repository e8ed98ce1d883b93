//! Maps induced on chains and homology by a vertex map.
//!
//! A monotone map of posets sends chains to chains, so its vertex map is
//! simplicial on order complexes. A simplex whose image repeats a vertex is
//! degenerate and maps to zero.

use std::collections::HashSet;

use super::homology::{add_column, parity_set};
use super::{Homology, InvariantError, SimplicialComplex};
use crate::hyperspace::HyperLevel;

/// Sparse matrix over the two-element field, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    columns: Vec<Vec<u32>>,
}

impl Gf2Matrix {
    /// `columns[j]` lists the rows holding a one in column `j`.
    pub fn new(rows: usize, columns: Vec<Vec<u32>>) -> Self {
        let columns = columns.into_iter().map(parity_set).collect();
        Self { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn nonzeros(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `self * rhs`.
    pub fn multiply(&self, rhs: &Gf2Matrix) -> Result<Gf2Matrix, InvariantError> {
        if rhs.rows != self.cols() {
            return Err(InvariantError::ShapeMismatch {
                left_cols: self.cols(),
                right_rows: rhs.rows,
            });
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc = Vec::new();
                for &k in col {
                    add_column(&mut acc, &self.columns[k as usize]);
                }
                acc
            })
            .collect();
        Ok(Gf2Matrix {
            rows: self.rows,
            columns,
        })
    }
}

/// Image of the `d`-simplex at `index` under `vertex_map`: `None` when
/// degenerate.
fn image_simplex(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[u32],
    d: usize,
    index: usize,
) -> Result<Option<u32>, InvariantError> {
    let mut image: Vec<u32> = source
        .simplex(d, index)
        .iter()
        .map(|&v| vertex_map[v as usize])
        .collect();
    image.sort_unstable();
    if image.windows(2).any(|w| w[0] == w[1]) {
        return Ok(None);
    }
    target
        .index_of(&image)
        .map(|i| Some(i as u32))
        .ok_or(InvariantError::MissingSimplex { simplex: image })
}

fn check_vertex_map(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[u32],
) -> Result<(), InvariantError> {
    if vertex_map.len() != source.vertex_count() {
        return Err(InvariantError::VertexMapLength {
            expected: source.vertex_count(),
            found: vertex_map.len(),
        });
    }
    if let Some(&v) = vertex_map
        .iter()
        .find(|&&v| v as usize >= target.vertex_count())
    {
        return Err(InvariantError::VertexOutOfRange {
            vertex: v as usize,
            count: target.vertex_count(),
        });
    }
    Ok(())
}

/// Matrix of the chain map `C_d(source) -> C_d(target)`.
pub fn chain_map_matrix(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[u32],
    d: usize,
) -> Result<Gf2Matrix, InvariantError> {
    check_vertex_map(source, target, vertex_map)?;
    let columns = (0..source.count(d))
        .map(|i| {
            Ok(image_simplex(source, target, vertex_map, d, i)?
                .into_iter()
                .collect())
        })
        .collect::<Result<Vec<Vec<u32>>, InvariantError>>()?;
    Ok(Gf2Matrix::new(target.count(d), columns))
}

/// Image of a chain (sorted simplex indices) under the chain map.
fn map_chain(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[u32],
    d: usize,
    chain: &[u32],
) -> Result<Vec<u32>, InvariantError> {
    let mut out = Vec::with_capacity(chain.len());
    for &s in chain {
        if let Some(t) = image_simplex(source, target, vertex_map, d, s as usize)? {
            out.push(t);
        }
    }
    Ok(parity_set(out))
}

/// Rank of `H_k(source) -> H_k(target)` induced by `vertex_map`.
pub fn induced_rank(
    source: &SimplicialComplex,
    source_homology: &Homology,
    target: &SimplicialComplex,
    target_homology: &Homology,
    vertex_map: &[u32],
    k: usize,
) -> Result<usize, InvariantError> {
    check_vertex_map(source, target, vertex_map)?;
    if k > source_homology.max_degree() || k > target_homology.max_degree() {
        return Err(InvariantError::DimensionCap {
            needed: k,
            available: source_homology
                .max_degree()
                .min(target_homology.max_degree()),
        });
    }
    if k == 0 {
        let mut seen_source = HashSet::new();
        let mut hit = HashSet::new();
        for v in 0..source.vertex_count() {
            if seen_source.insert(source_homology.component_of(v)) {
                hit.insert(target_homology.component_of(vertex_map[v] as usize));
            }
        }
        return Ok(hit.len());
    }
    let boundary = target_homology.boundary(k);
    // independent images, keyed by their lowest entry
    let mut pivots: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    let mut rank = 0;
    for cycle in source_homology.basis(k) {
        let mut image = map_chain(source, target, vertex_map, k, cycle)?;
        loop {
            image = boundary.reduce(image);
            match image.last() {
                None => break,
                Some(low) => match pivots.get(low) {
                    Some(col) => add_column(&mut image, col),
                    None => {
                        pivots.insert(*low, image);
                        rank += 1;
                        break;
                    }
                },
            }
        }
    }
    Ok(rank)
}

/// Vertex map of a monotone poset map given by element images. Refuses maps
/// that are not monotone, since only those are simplicial on order complexes.
pub fn poset_vertex_map(
    domain: &HyperLevel,
    images: &[u32],
    codomain: &HyperLevel,
) -> Result<Vec<u32>, InvariantError> {
    if images.len() != domain.len() {
        return Err(InvariantError::VertexMapLength {
            expected: domain.len(),
            found: images.len(),
        });
    }
    for (a, b) in domain.comparable_pairs() {
        let (ia, ib) = (images[a as usize] as usize, images[b as usize] as usize);
        if !codomain.is_below(ia, ib) {
            return Err(InvariantError::NotMonotone {
                smaller: a as usize,
                larger: b as usize,
            });
        }
    }
    Ok(images.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::homology;

    fn cycle(n: u32) -> SimplicialComplex {
        SimplicialComplex::from_simplices(n as usize, (0..n).map(|i| vec![i, (i + 1) % n]), 2)
            .unwrap()
    }

    #[test]
    fn identity_has_full_rank() {
        let c = cycle(5);
        let h = homology(&c, 1).unwrap();
        let id: Vec<u32> = (0..5).collect();
        assert_eq!(induced_rank(&c, &h, &c, &h, &id, 0).unwrap(), 1);
        assert_eq!(induced_rank(&c, &h, &c, &h, &id, 1).unwrap(), 1);
    }

    #[test]
    fn wrapping_and_collapsing_maps() {
        let fine = cycle(8);
        let coarse = cycle(4);
        let hf = homology(&fine, 1).unwrap();
        let hc = homology(&coarse, 1).unwrap();
        let wrap: Vec<u32> = (0..8).map(|i| i / 2).collect();
        assert_eq!(induced_rank(&fine, &hf, &coarse, &hc, &wrap, 1).unwrap(), 1);
        // an arc of the 4-cycle: the loop is sent to a contractible path
        let fold: Vec<u32> = vec![0, 1, 2, 3, 2, 1, 0, 0];
        let err = induced_rank(&fine, &hf, &coarse, &hc, &fold, 1);
        assert_eq!(err.unwrap(), 0);
        let filled =
            SimplicialComplex::from_simplices(4, vec![vec![0, 1, 2], vec![0, 2, 3]], 2).unwrap();
        let hfill = homology(&filled, 1).unwrap();
        assert_eq!(
            induced_rank(&fine, &hf, &filled, &hfill, &wrap, 1).unwrap(),
            0
        );
    }

    #[test]
    fn components_are_tracked() {
        let two = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]], 1).unwrap();
        let h = homology(&two, 0).unwrap();
        assert_eq!(induced_rank(&two, &h, &two, &h, &[0, 1], 0).unwrap(), 2);
        assert_eq!(induced_rank(&two, &h, &two, &h, &[1, 1], 0).unwrap(), 1);
    }

    #[test]
    fn matrix_product_matches_composite() {
        let a = cycle(8);
        let b = cycle(4);
        let c = SimplicialComplex::from_simplices(2, vec![vec![0, 1]], 2).unwrap();
        let f: Vec<u32> = (0..8).map(|i| i / 2).collect();
        let g: Vec<u32> = vec![0, 1, 1, 0];
        let gf: Vec<u32> = f.iter().map(|&v| g[v as usize]).collect();
        for d in 0..=1 {
            let mf = chain_map_matrix(&a, &b, &f, d).unwrap();
            let mg = chain_map_matrix(&b, &c, &g, d).unwrap();
            let mgf = chain_map_matrix(&a, &c, &gf, d).unwrap();
            assert_eq!(mg.multiply(&mf).unwrap(), mgf);
        }
        let m = chain_map_matrix(&a, &b, &f, 1).unwrap();
        assert_eq!(m.nonzeros(), 4);
        assert!(m.multiply(&m).is_err());
    }
}
