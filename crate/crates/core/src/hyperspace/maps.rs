//! Multivalued maps into finite nets: nearest-point maps, bonding maps and
//! their composites.

use rayon::prelude::*;

use super::{HyperLevel, HyperspaceError};
use crate::construction::Level;
use crate::metric::MetricGround;

/// What a [`MultiMap`] is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapDomain {
    /// Ground points of a metric sample.
    Ground,
    /// Elements of the hyperlevel with this index.
    Elements { level: usize },
}

/// A multivalued map: each domain item goes to a non-empty sorted set of
/// target indices. The diameter is the largest image diameter.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiMap {
    domain: MapDomain,
    images: Vec<Vec<usize>>,
    image_diameters: Vec<f64>,
    diameter: f64,
}

impl MultiMap {
    /// Builds a map from raw images, measuring diameters in `target`.
    /// Images are sorted and deduplicated.
    pub fn new(
        domain: MapDomain,
        mut images: Vec<Vec<usize>>,
        target: &MetricGround,
    ) -> Result<Self, HyperspaceError> {
        for (item, image) in images.iter_mut().enumerate() {
            if image.is_empty() {
                return Err(HyperspaceError::EmptyImage { item });
            }
            image.sort_unstable();
            image.dedup();
            if let Some(&point) = image.iter().find(|&&a| a >= target.len()) {
                return Err(HyperspaceError::TargetOutOfRange { item, point });
            }
        }
        let image_diameters: Vec<f64> = images
            .par_iter()
            .map(|image| target.set_diameter(image))
            .collect();
        let diameter = image_diameters.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            domain,
            images,
            image_diameters,
            diameter,
        })
    }

    pub fn domain(&self) -> MapDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, item: usize) -> &[usize] {
        &self.images[item]
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn image_diameters(&self) -> &[f64] {
        &self.image_diameters
    }

    /// Recorded maximum image diameter.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Recomputes the maximum image diameter in `target`.
    pub fn recompute_diameter(&self, target: &MetricGround) -> f64 {
        self.images
            .par_iter()
            .map(|image| target.set_diameter(image))
            .reduce(|| 0.0, f64::max)
    }

    /// Item with the largest image diameter.
    pub fn worst_item(&self) -> usize {
        argmax(&self.image_diameters)
    }

    /// Image of a set of domain ground points: the union of their images.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        union_of(set.iter().map(|&x| self.images[x].as_slice()))
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Sorted union of sorted sets.
pub fn union_of<'a>(sets: impl IntoIterator<Item = &'a [usize]>) -> Vec<usize> {
    let mut out: Vec<usize> = sets.into_iter().flatten().copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Absolute tie tolerance: `relative` times the ground diameter.
pub fn tie_tolerance(ground: &MetricGround, relative: f64) -> f64 {
    relative * ground.diameter()
}

/// The nearest-point map `x -> {a in net : d(x, a) <= d(x, net) + tau}` on
/// every ground point.
pub fn nearest_point_map(
    ground: &MetricGround,
    net: &[usize],
    tau: f64,
) -> Result<MultiMap, HyperspaceError> {
    if net.is_empty() {
        return Err(HyperspaceError::EmptyNet);
    }
    let images: Vec<Vec<usize>> = (0..ground.len())
        .into_par_iter()
        .map(|x| nearest_points(ground, x, net, tau))
        .collect();
    MultiMap::new(MapDomain::Ground, images, ground)
}

fn nearest_points(ground: &MetricGround, x: usize, net: &[usize], tau: f64) -> Vec<usize> {
    let row = ground.row(x);
    let best = net.iter().map(|&a| row[a]).fold(f64::INFINITY, f64::min);
    let mut out: Vec<usize> = net
        .iter()
        .copied()
        .filter(|&a| row[a] <= best + tau)
        .collect();
    out.sort_unstable();
    out
}

/// The bonding map `p(C) = union of q_coarse(a) over a in C` on every element
/// of `fine`, where `q_coarse` is the nearest-point map of the coarse net.
///
/// Every image must have diameter below `2 epsilon` of the coarse level;
/// anything else means the sequence is not adjusted and is an error.
pub fn bonding_map(
    ground: &MetricGround,
    fine: &HyperLevel,
    coarse: &Level,
    q_coarse: &MultiMap,
) -> Result<MultiMap, HyperspaceError> {
    if q_coarse.len() != ground.len() || q_coarse.domain() != MapDomain::Ground {
        return Err(HyperspaceError::DomainMismatch {
            expected: ground.len(),
            found: q_coarse.len(),
        });
    }
    let images: Vec<Vec<usize>> = fine
        .elements()
        .par_iter()
        .map(|c| q_coarse.image_of_set(c))
        .collect();
    let map = MultiMap::new(
        MapDomain::Elements {
            level: fine.index(),
        },
        images,
        ground,
    )?;
    check_within_level(&map, coarse)?;
    Ok(map)
}

fn check_within_level(map: &MultiMap, coarse: &Level) -> Result<(), HyperspaceError> {
    let bound = 2.0 * coarse.epsilon;
    if map.diameter() < bound {
        return Ok(());
    }
    let worst = map.worst_item();
    Err(HyperspaceError::DiameterTooLarge {
        level: coarse.index,
        set: map.image(worst).to_vec(),
        diameter: map.diameter(),
        bound,
    })
}

/// Ids in `coarse` of the images of a bonding map.
pub fn element_ids(map: &MultiMap, coarse: &HyperLevel) -> Result<Vec<u32>, HyperspaceError> {
    map.images()
        .iter()
        .map(|image| {
            coarse
                .id_of(image)
                .map(|id| id as u32)
                .ok_or_else(|| HyperspaceError::MissingElement {
                    level: coarse.index(),
                    set: image.clone(),
                })
        })
        .collect()
}

/// The composite `p_{n,m} = p_{n,n+1} ∘ ... ∘ p_{m-1,m}` on the elements of
/// the finest level.
///
/// `chain` holds the hyperlevels `n..=m` and `bonds[i]` the bonding map from
/// `chain[i + 1]` to `chain[i]`. With one level the result is the identity.
pub fn composite_bonding(
    ground: &MetricGround,
    chain: &[&HyperLevel],
    bonds: &[&MultiMap],
) -> Result<MultiMap, HyperspaceError> {
    let finest = *chain.last().ok_or(HyperspaceError::EmptyChain)?;
    if bonds.len() + 1 != chain.len() {
        return Err(HyperspaceError::ChainLength {
            levels: chain.len(),
            maps: bonds.len(),
        });
    }
    for (i, bond) in bonds.iter().enumerate() {
        if bond.len() != chain[i + 1].len() {
            return Err(HyperspaceError::DomainMismatch {
                expected: chain[i + 1].len(),
                found: bond.len(),
            });
        }
    }
    let images: Vec<Vec<usize>> = (0..finest.len())
        .into_par_iter()
        .map(|c| {
            let mut current = finest.element(c).to_vec();
            for i in (0..bonds.len()).rev() {
                let id = chain[i + 1].id_of(&current).ok_or_else(|| {
                    HyperspaceError::MissingElement {
                        level: chain[i + 1].index(),
                        set: current.clone(),
                    }
                })?;
                current = bonds[i].image(id).to_vec();
            }
            Ok(current)
        })
        .collect::<Result<_, HyperspaceError>>()?;
    let map = MultiMap::new(
        MapDomain::Elements {
            level: finest.index(),
        },
        images,
        ground,
    )?;
    let coarsest = chain[0];
    let bound = coarsest.bound();
    if !(map.diameter() < bound) {
        let worst = map.worst_item();
        return Err(HyperspaceError::DiameterTooLarge {
            level: coarsest.index(),
            set: map.image(worst).to_vec(),
            diameter: map.diameter(),
            bound,
        });
    }
    Ok(map)
}

/// Outcome of [`is_continuous`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuity {
    /// Monotone on every comparable pair; carries the number of pairs checked.
    Monotone { pairs: usize },
    /// `element(smaller) ⊆ element(larger)` but the images are not nested.
    Violation { smaller: usize, larger: usize },
}

impl Continuity {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Continuity::Monotone { .. })
    }
}

/// A map between finite posets with the upper semifinite topology is
/// continuous exactly when it is monotone for inclusion; this checks every
/// comparable pair of `domain`.
pub fn is_continuous(map: &MultiMap, domain: &HyperLevel) -> Result<Continuity, HyperspaceError> {
    if map.len() != domain.len() {
        return Err(HyperspaceError::DomainMismatch {
            expected: domain.len(),
            found: map.len(),
        });
    }
    let pairs = domain.comparable_pairs();
    let violation = pairs.par_iter().find_map_first(|&(a, b)| {
        let (a, b) = (a as usize, b as usize);
        (!super::is_subset(map.image(a), map.image(b))).then_some((a, b))
    });
    Ok(match violation {
        Some((smaller, larger)) => Continuity::Violation { smaller, larger },
        None => Continuity::Monotone { pairs: pairs.len() },
    })
}

/// The union map `x -> f(x) ∪ g(x)`.
pub fn union_map(
    f: &MultiMap,
    g: &MultiMap,
    target: &MetricGround,
) -> Result<MultiMap, HyperspaceError> {
    if f.domain() != g.domain() || f.len() != g.len() {
        return Err(HyperspaceError::DomainMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let images = f
        .images()
        .iter()
        .zip(g.images())
        .map(|(a, b)| union_of([a.as_slice(), b.as_slice()]))
        .collect();
    MultiMap::new(f.domain(), images, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_adjusted_sequence, SequenceParams};
    use crate::hyperspace::HyperOptions;
    use crate::metric::{SpaceRegistry, SpaceSpec};
    use std::sync::Arc;

    /// The four sample points taken as a finite space in their own right.
    fn circle4() -> MetricGround {
        SpaceRegistry::with_builtins()
            .generate(&SpaceSpec::new("circle").samples(4))
            .unwrap()
            .with_density(0.0)
            .unwrap()
    }

    fn triangle() -> MetricGround {
        let h = 3f64.sqrt() / 2.0;
        MetricGround::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], 0.0).unwrap()
    }

    #[test]
    fn nearest_point_examples() {
        let g = circle4();
        let q = nearest_point_map(&g, &[0, 2], 1e-9).unwrap();
        assert_eq!(q.image(0), &[0]);
        assert_eq!(q.image(1), &[0, 2]);
        assert_eq!(q.image(3), &[0, 2]);
        assert!((q.diameter() - 2.0).abs() < 1e-12);

        let interval =
            MetricGround::from_coords((0..=100).map(|i| vec![i as f64 / 100.0]).collect(), 0.0)
                .unwrap();
        let q = nearest_point_map(&interval, &[0, 100], tie_tolerance(&interval, 1e-9)).unwrap();
        assert_eq!(q.image(50), &[0, 100]);
        assert_eq!(q.image(49), &[0]);
        let exact = nearest_point_map(&interval, &[0, 100], 0.0).unwrap();
        assert_eq!(exact.image(0), &[0]);
        assert!(nearest_point_map(&interval, &[], 0.0).is_err());
    }

    #[test]
    fn bonding_on_four_point_circle() {
        let g = Arc::new(circle4());
        let seq = build_adjusted_sequence(
            Arc::clone(&g),
            &SequenceParams::new(1.5, 2, 0.9).with_net_ratio(1.0),
        )
        .unwrap();
        let (coarse, fine) = (seq.level(1).unwrap(), seq.level(2).unwrap());
        assert_eq!(coarse.net, vec![0, 2]);
        assert_eq!(fine.net, vec![0, 1, 2, 3]);
        let q1 = nearest_point_map(&g, &coarse.net, 1e-9).unwrap();
        let h2 = HyperLevel::build(&g, fine, &HyperOptions::default()).unwrap();
        let p = bonding_map(&g, &h2, coarse, &q1).unwrap();
        let id = h2.id_of(&[1]).unwrap();
        assert_eq!(p.image(id), &[0, 2]);
        assert!((p.image_diameters()[id] - 2.0).abs() < 1e-12);
        assert!(p.diameter() < 3.0);
        assert_eq!(p.image(h2.id_of(&[0]).unwrap()), &[0]);
    }

    #[test]
    fn bonding_rejects_large_images() {
        let g = circle4();
        let level = Level {
            index: 1,
            epsilon: 0.9,
            net: vec![0, 2],
            gamma: 2f64.sqrt(),
        };
        let fine = Level {
            index: 2,
            epsilon: 0.5,
            net: vec![0, 1, 2, 3],
            gamma: 0.0,
        };
        let q = nearest_point_map(&g, &level.net, 1e-9).unwrap();
        let h = HyperLevel::build(&g, &fine, &HyperOptions::default()).unwrap();
        assert!(matches!(
            bonding_map(&g, &h, &level, &q),
            Err(HyperspaceError::DiameterTooLarge { level: 1, .. })
        ));
    }

    #[test]
    fn continuity_on_triangle() {
        let g = triangle();
        let level = Level {
            index: 2,
            epsilon: 0.6,
            net: vec![0, 1, 2],
            gamma: 0.0,
        };
        let h = HyperLevel::build(&g, &level, &HyperOptions::default()).unwrap();
        let constant =
            MultiMap::new(MapDomain::Elements { level: 2 }, vec![vec![0]; h.len()], &g).unwrap();
        assert!(is_continuous(&constant, &h).unwrap().is_continuous());

        let coarse = Level {
            index: 1,
            epsilon: 0.6,
            net: vec![0, 1],
            gamma: 0.5,
        };
        let q = nearest_point_map(&g, &coarse.net, 1e-9).unwrap();
        let p = bonding_map(&g, &h, &coarse, &q).unwrap();
        assert_eq!(
            is_continuous(&p, &h).unwrap(),
            Continuity::Monotone { pairs: 12 }
        );

        let mut images: Vec<Vec<usize>> = h.elements().to_vec();
        let pair = h.id_of(&[0, 1]).unwrap();
        images[pair] = vec![2];
        let broken = MultiMap::new(MapDomain::Elements { level: 2 }, images, &g).unwrap();
        let verdict = is_continuous(&broken, &h).unwrap();
        assert!(matches!(
            verdict,
            Continuity::Violation { larger, smaller } if larger == pair && smaller < 3
        ));
    }

    #[test]
    fn composite_of_one_step_is_the_bond() {
        let g = Arc::new(
            SpaceRegistry::with_builtins()
                .generate(&SpaceSpec::new("circle").samples(128))
                .unwrap(),
        );
        let seq =
            build_adjusted_sequence(Arc::clone(&g), &SequenceParams::new(1.0, 3, 0.9)).unwrap();
        let options = HyperOptions::default();
        let tau = tie_tolerance(&g, 1e-9);
        let h3 = HyperLevel::build(&g, seq.level(3).unwrap(), &options).unwrap();
        let q2 = nearest_point_map(&g, &seq.level(2).unwrap().net, tau).unwrap();
        let p23 = bonding_map(&g, &h3, seq.level(2).unwrap(), &q2).unwrap();
        let extras = p23.images().to_vec();
        let h2 =
            HyperLevel::build_with_extras(&g, seq.level(2).unwrap(), &options, &extras).unwrap();
        let q1 = nearest_point_map(&g, &seq.level(1).unwrap().net, tau).unwrap();
        let p12 = bonding_map(&g, &h2, seq.level(1).unwrap(), &q1).unwrap();
        let h1 = HyperLevel::build_with_extras(&g, seq.level(1).unwrap(), &options, p12.images())
            .unwrap();

        let single = composite_bonding(&g, &[&h2, &h3], &[&p23]).unwrap();
        assert_eq!(single.images(), p23.images());
        let double = composite_bonding(&g, &[&h1, &h2, &h3], &[&p12, &p23]).unwrap();
        assert!(double.diameter() < h1.bound());
        for &a in h3.net() {
            let id = h3.id_of(&[a]).unwrap();
            assert!(double.image_diameters()[id] < seq.level(1).unwrap().epsilon);
        }
        assert!(element_ids(&double, &h1).is_ok());
        let identity = composite_bonding(&g, &[&h3], &[]).unwrap();
        assert_eq!(identity.images(), h3.elements());
    }
}
