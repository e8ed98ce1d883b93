//! Approximative maps and their conversion to finite type.
//!
//! Composing each term `f_n` with the nearest-point map of a `beta_n`-net
//! `B_n` of the target gives a map with images inside the finite set `B_n`.
//! Two points of such an image are within `beta_n` of points of one image of
//! `f_n`, so the new diameter stays below `2 beta_n + D_n`.

use std::sync::Arc;

use rayon::prelude::*;

use super::HomotopyError;
use crate::construction::gamma;
use crate::hyperspace::{nearest_point_map, union_of, MapDomain, MultiMap};
use crate::metric::MetricGround;

/// A finite prefix `f_1, f_2, ...` of an approximative map from a source
/// ground to `target`.
#[derive(Clone, Debug)]
pub struct ApproximativeMap {
    target: Arc<MetricGround>,
    maps: Vec<MultiMap>,
}

impl ApproximativeMap {
    pub fn new(target: Arc<MetricGround>, maps: Vec<MultiMap>) -> Result<Self, HomotopyError> {
        if let Some(first) = maps.first() {
            if let Some(other) = maps.iter().find(|m| m.len() != first.len()) {
                return Err(HomotopyError::DomainMismatch {
                    left: first.len(),
                    right: other.len(),
                });
            }
        }
        Ok(Self { target, maps })
    }

    pub fn target(&self) -> &MetricGround {
        &self.target
    }

    pub fn maps(&self) -> &[MultiMap] {
        &self.maps
    }

    /// Term `f_n` for 1-based `n`.
    pub fn term(&self, n: usize) -> &MultiMap {
        &self.maps[n - 1]
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Recorded diameters `D_n`.
    pub fn diameters(&self) -> Vec<f64> {
        self.maps.iter().map(MultiMap::diameter).collect()
    }

    /// Whether `D_n` never increases over the stored prefix.
    pub fn diameters_non_increasing(&self) -> bool {
        self.diameters().windows(2).all(|w| w[1] <= w[0])
    }
}

/// Replaces every term by `r_{B_n} ∘ f_n`, where `r_{B_n}` is the
/// nearest-point map of `nets[n - 1]` with tie tolerance `tau`.
///
/// Each `B_n` must be a `betas[n - 1]`-net of the target (every target point
/// strictly closer than `beta_n`) and the betas must strictly decrease.
pub fn finite_type_convert(
    f: &ApproximativeMap,
    betas: &[f64],
    nets: &[Vec<usize>],
    tau: f64,
) -> Result<ApproximativeMap, HomotopyError> {
    if betas.len() != f.len() || nets.len() != f.len() {
        return Err(HomotopyError::LengthMismatch {
            maps: f.len(),
            betas: betas.len(),
            nets: nets.len(),
        });
    }
    for (k, &beta) in betas.iter().enumerate() {
        if !(beta > 0.0) || (k > 0 && !(beta < betas[k - 1])) {
            return Err(HomotopyError::BetasNotDecreasing { n: k + 1 });
        }
    }
    let target = f.target();
    for (k, (net, &beta)) in nets.iter().zip(betas).enumerate() {
        let covering = gamma(target, net).map_err(|_| HomotopyError::NotDense {
            n: k + 1,
            gamma: f64::INFINITY,
            beta,
        })?;
        if !(covering < beta) {
            return Err(HomotopyError::NotDense {
                n: k + 1,
                gamma: covering,
                beta,
            });
        }
    }
    let maps = f
        .maps()
        .iter()
        .zip(nets)
        .map(|(term, net)| {
            let r = nearest_point_map(target, net, tau)?;
            let images: Vec<Vec<usize>> = term
                .images()
                .par_iter()
                .map(|image| union_of(image.iter().map(|&y| r.image(y))))
                .collect();
            Ok(MultiMap::new(MapDomain::Ground, images, target)?)
        })
        .collect::<Result<Vec<_>, HomotopyError>>()?;
    ApproximativeMap::new(Arc::clone(&f.target), maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_net;
    use crate::metric::{SpaceRegistry, SpaceSpec};

    fn circle(n: usize) -> Arc<MetricGround> {
        Arc::new(
            SpaceRegistry::with_builtins()
                .generate(&SpaceSpec::new("circle").samples(n))
                .unwrap(),
        )
    }

    #[test]
    fn finite_type_map_is_unchanged_by_a_fine_net() {
        let g = circle(16);
        let f1 = MultiMap::new(MapDomain::Ground, (0..16).map(|x| vec![x]).collect(), &g).unwrap();
        let f = ApproximativeMap::new(Arc::clone(&g), vec![f1.clone(), f1]).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let converted = finite_type_convert(&f, &[0.1, 0.05], &[all.clone(), all], 1e-12).unwrap();
        assert_eq!(converted.maps(), f.maps());
    }

    #[test]
    fn constant_whole_target_stays_within_bound() {
        let g = circle(64);
        let whole: Vec<usize> = (0..64).collect();
        let d = g.diameter();
        let term = MultiMap::new(MapDomain::Ground, vec![whole; 64], &g).unwrap();
        let f = ApproximativeMap::new(Arc::clone(&g), vec![term.clone(), term]).unwrap();
        let betas = [0.5, 0.25];
        let nets: Vec<Vec<usize>> = betas.iter().map(|&b| build_net(&g, b)).collect();
        let converted = finite_type_convert(&f, &betas, &nets, 1e-12).unwrap();
        for (k, m) in converted.maps().iter().enumerate() {
            assert!(m.recompute_diameter(&g) <= d + 2.0 * betas[k]);
            assert!(m
                .images()
                .iter()
                .all(|i| i.iter().all(|y| nets[k].contains(y))));
        }
    }

    #[test]
    fn rejects_sparse_nets_and_bad_betas() {
        let g = circle(16);
        let f1 = MultiMap::new(MapDomain::Ground, (0..16).map(|x| vec![x]).collect(), &g).unwrap();
        let f = ApproximativeMap::new(Arc::clone(&g), vec![f1]).unwrap();
        assert!(matches!(
            finite_type_convert(&f, &[0.1], &[vec![0]], 0.0),
            Err(HomotopyError::NotDense { n: 1, .. })
        ));
        assert!(matches!(
            finite_type_convert(&f, &[-1.0], &[vec![0]], 0.0),
            Err(HomotopyError::BetasNotDecreasing { n: 1 })
        ));
        assert!(finite_type_convert(&f, &[], &[], 0.0).is_err());
    }
}
