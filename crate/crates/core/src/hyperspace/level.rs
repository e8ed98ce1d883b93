//! The finite poset of small subsets of one net.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::HyperspaceError;
use crate::construction::Level;
use crate::metric::MetricGround;

/// Size limits for [`HyperLevel`] enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperOptions {
    /// Subsets are enumerated up to this cardinality. Larger elements only
    /// appear when requested as extras (images of a finer level).
    pub cardinality_cap: usize,
    /// Maximum number of elements before enumeration gives up.
    pub element_budget: usize,
}

impl HyperOptions {
    pub const DEFAULT_ELEMENT_BUDGET: usize = 4_000_000;

    /// Enough cardinality for homology through `max_degree`: simplices of
    /// dimension `max_degree + 1` have `max_degree + 2` vertices.
    pub fn for_degree(max_degree: usize) -> Self {
        Self {
            cardinality_cap: max_degree + 2,
            element_budget: Self::DEFAULT_ELEMENT_BUDGET,
        }
    }
}

impl Default for HyperOptions {
    fn default() -> Self {
        Self::for_degree(1)
    }
}

/// `U_{2 epsilon}(A)`: non-empty subsets of the net `A` with diameter below
/// `2 epsilon`, ordered by inclusion.
///
/// Elements are sorted by cardinality and then lexicographically, so a chain
/// `C_0 < C_1 < ...` always has increasing element ids. Members are ground
/// indices. The order is stored as covering relations; [`is_below`]
/// answers general inclusion queries.
///
/// [`is_below`]: HyperLevel::is_below
#[derive(Clone, Debug)]
pub struct HyperLevel {
    index: usize,
    epsilon: f64,
    net: Vec<usize>,
    elements: Vec<Vec<usize>>,
    diameters: Vec<f64>,
    lookup: HashMap<Vec<usize>, u32>,
    lower_covers: Vec<Vec<u32>>,
    upper_covers: Vec<Vec<u32>>,
    cardinality_cap: usize,
    extra_count: usize,
}

impl HyperLevel {
    /// Enumerates `U_{2 epsilon_n}(A_n)` up to the cardinality cap.
    pub fn build(
        ground: &MetricGround,
        level: &Level,
        options: &HyperOptions,
    ) -> Result<Self, HyperspaceError> {
        Self::build_with_extras(ground, level, options, &[])
    }

    /// Like [`build`](Self::build), and additionally includes every `extra`
    /// set (a subset of the net of diameter below `2 epsilon`) with all of its
    /// non-empty subsets, regardless of cardinality.
    pub fn build_with_extras(
        ground: &MetricGround,
        level: &Level,
        options: &HyperOptions,
        extras: &[Vec<usize>],
    ) -> Result<Self, HyperspaceError> {
        let bound = 2.0 * level.epsilon;
        let net = level.net.clone();
        let cap = options.cardinality_cap.max(1);
        let mut sets = enumerate_cliques(ground, &net, bound, cap, options.element_budget)?;

        let net_set: HashSet<usize> = net.iter().copied().collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut extra_sets = Vec::new();
        for extra in extras {
            let mut set = extra.clone();
            set.sort_unstable();
            set.dedup();
            if set.len() <= cap || seen.contains(&set) {
                continue;
            }
            if let Some(&outside) = set.iter().find(|a| !net_set.contains(a)) {
                return Err(HyperspaceError::NotInNet {
                    level: level.index,
                    point: outside,
                });
            }
            let diameter = ground.set_diameter(&set);
            if !(diameter < bound) {
                return Err(HyperspaceError::DiameterTooLarge {
                    level: level.index,
                    set,
                    diameter,
                    bound,
                });
            }
            if set.len() > 24 {
                return Err(HyperspaceError::ElementBudget {
                    budget: options.element_budget,
                    cardinality: set.len(),
                });
            }
            for mask in 1u32..(1u32 << set.len()) {
                if (mask.count_ones() as usize) <= cap {
                    continue;
                }
                let subset: Vec<usize> = set
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                if seen.insert(subset.clone()) {
                    extra_sets.push(subset);
                }
            }
            if sets.len() + extra_sets.len() > options.element_budget {
                return Err(HyperspaceError::ElementBudget {
                    budget: options.element_budget,
                    cardinality: set.len(),
                });
            }
        }
        let extra_count = extra_sets.len();
        sets.extend(extra_sets);
        sets.par_sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        let diameters: Vec<f64> = sets.par_iter().map(|s| ground.set_diameter(s)).collect();
        let lookup: HashMap<Vec<usize>, u32> = sets
            .iter()
            .enumerate()
            .map(|(id, s)| (s.clone(), id as u32))
            .collect();
        let lower_covers: Vec<Vec<u32>> = sets
            .par_iter()
            .map(|s| {
                if s.len() < 2 {
                    return Vec::new();
                }
                let mut covers: Vec<u32> = (0..s.len())
                    .map(|skip| {
                        let face: Vec<usize> = s
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != skip)
                            .map(|(_, &a)| a)
                            .collect();
                        lookup[&face]
                    })
                    .collect();
                covers.sort_unstable();
                covers
            })
            .collect();
        let mut upper_covers = vec![Vec::new(); sets.len()];
        for (id, covers) in lower_covers.iter().enumerate() {
            for &c in covers {
                upper_covers[c as usize].push(id as u32);
            }
        }
        Ok(Self {
            index: level.index,
            epsilon: level.epsilon,
            net,
            elements: sets,
            diameters,
            lookup,
            lower_covers,
            upper_covers,
            cardinality_cap: cap,
            extra_count,
        })
    }

    /// Index `n` of the underlying level.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Strict diameter bound `2 epsilon` of the elements.
    pub fn bound(&self) -> f64 {
        2.0 * self.epsilon
    }

    pub fn net(&self) -> &[usize] {
        &self.net
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &[usize] {
        &self.elements[id]
    }

    pub fn diameters(&self) -> &[f64] {
        &self.diameters
    }

    pub fn cardinality_cap(&self) -> usize {
        self.cardinality_cap
    }

    /// Number of elements above the cardinality cap added as extras.
    pub fn extra_count(&self) -> usize {
        self.extra_count
    }

    /// Id of an element given as a sorted set of ground indices.
    pub fn id_of(&self, set: &[usize]) -> Option<usize> {
        self.lookup.get(set).map(|&id| id as usize)
    }

    /// Elements covered by `id` (one member fewer).
    pub fn lower_covers(&self, id: usize) -> &[u32] {
        &self.lower_covers[id]
    }

    /// Elements covering `id` (one member more).
    pub fn upper_covers(&self, id: usize) -> &[u32] {
        &self.upper_covers[id]
    }

    /// `element(a) ⊆ element(b)`.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        is_subset(&self.elements[a], &self.elements[b])
    }

    /// Ids of the non-empty proper subsets of element `id`, ascending.
    pub fn proper_subsets(&self, id: usize) -> Vec<u32> {
        let set = &self.elements[id];
        let k = set.len();
        if k < 2 {
            return Vec::new();
        }
        let full = (1u64 << k) - 1;
        let mut out: Vec<u32> = (1..full)
            .map(|mask| {
                let subset: Vec<usize> = set
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                self.lookup[&subset]
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// All pairs `(a, b)` with `element(a) ⊊ element(b)`.
    pub fn comparable_pairs(&self) -> Vec<(u32, u32)> {
        (0..self.len())
            .into_par_iter()
            .flat_map_iter(|b| {
                self.proper_subsets(b)
                    .into_iter()
                    .map(move |a| (a, b as u32))
            })
            .collect()
    }
}

/// Sorted-set inclusion test.
pub fn is_subset(small: &[usize], large: &[usize]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    'outer: for a in small {
        for b in it.by_ref() {
            match b.cmp(a) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Cliques of the graph `d(a, b) < bound` on `net`, up to `cap` vertices.
fn enumerate_cliques(
    ground: &MetricGround,
    net: &[usize],
    bound: f64,
    cap: usize,
    budget: usize,
) -> Result<Vec<Vec<usize>>, HyperspaceError> {
    let m = net.len();
    let higher: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let row = ground.row(net[i]);
            ((i + 1)..m).filter(|&j| row[net[j]] < bound).collect()
        })
        .collect();

    let mut sets: Vec<Vec<usize>> = net.iter().map(|&a| vec![a]).collect();
    if sets.len() > budget {
        return Err(HyperspaceError::ElementBudget {
            budget,
            cardinality: 1,
        });
    }
    // Grow cliques one cardinality at a time; `frontier` holds cliques of the
    // current size as positions in `net` together with their common higher
    // neighbours.
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> =
        (0..m).map(|i| (vec![i], higher[i].clone())).collect();
    for cardinality in 2..=cap {
        let higher = &higher;
        let next: Vec<(Vec<usize>, Vec<usize>)> = frontier
            .par_iter()
            .flat_map_iter(|(clique, candidates)| {
                candidates.iter().map(move |&j| {
                    let mut grown = clique.clone();
                    grown.push(j);
                    let common = intersect_sorted(candidates, &higher[j]);
                    (grown, common)
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        if sets.len() + next.len() > budget {
            return Err(HyperspaceError::ElementBudget {
                budget,
                cardinality,
            });
        }
        sets.extend(
            next.iter()
                .map(|(clique, _)| clique.iter().map(|&p| net[p]).collect::<Vec<_>>()),
        );
        frontier = next;
    }
    for set in sets.iter_mut() {
        set.sort_unstable();
    }
    Ok(sets)
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MetricGround {
        let h = 3f64.sqrt() / 2.0;
        MetricGround::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], 0.0).unwrap()
    }

    fn level(epsilon: f64, net: Vec<usize>) -> Level {
        Level {
            index: 1,
            epsilon,
            net,
            gamma: 0.0,
        }
    }

    #[test]
    fn singleton_net_has_one_element() {
        let g = MetricGround::from_coords(vec![vec![0.0]], 0.0).unwrap();
        let h = HyperLevel::build(&g, &level(1.0, vec![0]), &HyperOptions::default()).unwrap();
        assert_eq!(h.elements(), &[vec![0]]);
    }

    #[test]
    fn triangle_elements_match_subset_enumeration() {
        let g = triangle();
        for (epsilon, expected) in [(0.6, 7), (0.4, 3)] {
            let h = HyperLevel::build(&g, &level(epsilon, vec![0, 1, 2]), &HyperOptions::default())
                .unwrap();
            let brute = (1u32..8)
                .filter(|mask| {
                    let set: Vec<usize> = (0..3).filter(|k| mask & (1 << k) != 0).collect();
                    g.set_diameter(&set) < 2.0 * epsilon
                })
                .count();
            assert_eq!(brute, expected);
            assert_eq!(h.len(), expected);
        }
    }

    #[test]
    fn ids_follow_cardinality_and_covers_are_consistent() {
        let g = triangle();
        let h =
            HyperLevel::build(&g, &level(0.6, vec![0, 1, 2]), &HyperOptions::default()).unwrap();
        assert_eq!(h.element(6), &[0, 1, 2]);
        assert_eq!(h.lower_covers(6), &[3, 4, 5]);
        assert_eq!(h.upper_covers(0), &[3, 4]);
        assert_eq!(h.proper_subsets(6), vec![0, 1, 2, 3, 4, 5]);
        assert!(h.is_below(0, 6) && !h.is_below(6, 0));
        assert_eq!(h.comparable_pairs().len(), 6 + 3 * 2);
    }

    #[test]
    fn cap_limits_cardinality_and_extras_extend_it() {
        let g =
            MetricGround::from_coords((0..5).map(|i| vec![i as f64 * 0.1]).collect(), 0.0).unwrap();
        let options = HyperOptions {
            cardinality_cap: 2,
            element_budget: 100,
        };
        let l = level(1.0, vec![0, 1, 2, 3, 4]);
        let h = HyperLevel::build(&g, &l, &options).unwrap();
        assert_eq!(h.len(), 5 + 10);
        let h = HyperLevel::build_with_extras(&g, &l, &options, &[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(h.len(), 5 + 10 + 4 + 1);
        assert_eq!(h.extra_count(), 5);
        assert!(h.id_of(&[0, 1, 3]).is_some());
        assert!(h.id_of(&[0, 1, 4]).is_none());
    }

    #[test]
    fn budget_overflow_names_cardinality() {
        let g =
            MetricGround::from_coords((0..6).map(|i| vec![i as f64 * 0.1]).collect(), 0.0).unwrap();
        let options = HyperOptions {
            cardinality_cap: 4,
            element_budget: 25,
        };
        let err = HyperLevel::build(&g, &level(1.0, (0..6).collect()), &options).unwrap_err();
        assert_eq!(
            err,
            HyperspaceError::ElementBudget {
                budget: 25,
                cardinality: 3
            }
        );
    }

    #[test]
    fn subset_test() {
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_subset(&[], &[0]));
        assert!(!is_subset(&[0, 1], &[1]));
    }
}
