//! Strategies for choosing finite nets, registered by name.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::metric::MetricGround;

/// Chooses a finite subset with every ground point strictly within `radius`
/// of it. Implementations must be deterministic.
pub trait NetStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Returns the selected ground indices, sorted ascending.
    fn select(&self, ground: &MetricGround, radius: f64) -> Vec<usize>;
}

/// Greedy farthest-point sampling seeded at point 0. Ties go to the lowest
/// index.
pub struct FarthestPoint;

impl NetStrategy for FarthestPoint {
    fn name(&self) -> &'static str {
        "farthest_point"
    }

    fn summary(&self) -> &'static str {
        "greedy farthest-point sampling from the lowest index"
    }

    fn select(&self, ground: &MetricGround, radius: f64) -> Vec<usize> {
        if ground.is_empty() {
            return Vec::new();
        }
        let mut selected = vec![0];
        let mut nearest: Vec<f64> = ground.row(0).to_vec();
        loop {
            let (far, far_dist) =
                nearest
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bi, bd), (i, &d)| {
                        if d > bd {
                            (i, d)
                        } else {
                            (bi, bd)
                        }
                    });
            if far_dist < radius {
                break;
            }
            selected.push(far);
            let row = ground.row(far);
            nearest
                .par_iter_mut()
                .with_min_len(1024)
                .zip(row.par_iter().with_min_len(1024))
                .for_each(|(n, &d)| {
                    if d < *n {
                        *n = d;
                    }
                });
        }
        selected.sort_unstable();
        selected
    }
}

/// Single pass in index order, keeping a point whenever it is not yet
/// covered.
pub struct FirstFit;

impl NetStrategy for FirstFit {
    fn name(&self) -> &'static str {
        "first_fit"
    }

    fn summary(&self) -> &'static str {
        "index-order scan keeping every point not yet covered"
    }

    fn select(&self, ground: &MetricGround, radius: f64) -> Vec<usize> {
        let mut selected: Vec<usize> = Vec::new();
        for x in 0..ground.len() {
            let row = ground.row(x);
            if selected.iter().all(|&a| row[a] >= radius) {
                selected.push(x);
            }
        }
        selected
    }
}

pub struct NetRegistry {
    strategies: BTreeMap<&'static str, Box<dyn NetStrategy>>,
}

impl NetRegistry {
    pub fn empty() -> Self {
        Self {
            strategies: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(FarthestPoint));
        registry.register(Box::new(FirstFit));
        registry
    }

    pub fn register(&mut self, strategy: Box<dyn NetStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn NetStrategy> {
        self.strategies.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.strategies.keys().copied()
    }
}

impl Default for NetRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
