//! The inverse sequence of hyperlevels built from an adjusted sequence.
//!
//! For each level `n` the tower holds the nearest-point map `q_n` on the
//! ground, the hyperlevel `U_{2 epsilon_n}(A_n)` and, for `n >= 2`, the bonding
//! map `p_{n-1,n}` together with its action on element ids.
//!
//! Hyperlevels are built from the finest level to the coarsest so that every
//! bonding image is an element of the coarser hyperlevel even when it is
//! larger than the cardinality cap.

use rayon::prelude::*;

use crate::construction::AdjustedSequence;
use crate::hyperspace::{
    bonding_map, element_ids, nearest_point_map, tie_tolerance, HyperLevel, HyperOptions, MultiMap,
};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct TowerOptions {
    /// Tie tolerance relative to the ground diameter.
    pub tie_relative: f64,
    pub hyper: HyperOptions,
}

impl TowerOptions {
    pub const DEFAULT_TIE_RELATIVE: f64 = 1e-9;

    pub fn for_degree(max_degree: usize) -> Self {
        Self {
            tie_relative: Self::DEFAULT_TIE_RELATIVE,
            hyper: HyperOptions::for_degree(max_degree),
        }
    }
}

impl Default for TowerOptions {
    fn default() -> Self {
        Self::for_degree(1)
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    sequence: AdjustedSequence,
    tau: f64,
    nearest: Vec<MultiMap>,
    hyperlevels: Vec<HyperLevel>,
    /// `bonds[i]`: `p_{i+1,i+2}` on the elements of level `i + 2`.
    bonds: Vec<MultiMap>,
    /// `vertex_maps[i]`: ids in level `i + 1` of the images of `bonds[i]`.
    vertex_maps: Vec<Vec<u32>>,
}

impl Tower {
    pub fn build(seq: &AdjustedSequence, options: &TowerOptions) -> Result<Self> {
        let ground = seq.ground();
        let tau = tie_tolerance(ground, options.tie_relative);
        let levels = seq.levels();
        let depth = levels.len();
        let nearest = levels
            .par_iter()
            .map(|l| nearest_point_map(ground, &l.net, tau))
            .collect::<Result<Vec<_>, _>>()?;

        let mut hyperlevels: Vec<Option<HyperLevel>> = (0..depth).map(|_| None).collect();
        let mut bonds: Vec<Option<MultiMap>> = (0..depth.saturating_sub(1)).map(|_| None).collect();
        let mut vertex_maps: Vec<Vec<u32>> = vec![Vec::new(); depth.saturating_sub(1)];
        if depth > 0 {
            hyperlevels[depth - 1] = Some(HyperLevel::build(
                ground,
                &levels[depth - 1],
                &options.hyper,
            )?);
        }
        for i in (0..depth.saturating_sub(1)).rev() {
            let fine = hyperlevels[i + 1]
                .as_ref()
                .expect("built finer level first");
            let bond = bonding_map(ground, fine, &levels[i], &nearest[i])?;
            let coarse =
                HyperLevel::build_with_extras(ground, &levels[i], &options.hyper, bond.images())?;
            vertex_maps[i] = element_ids(&bond, &coarse)?;
            hyperlevels[i] = Some(coarse);
            bonds[i] = Some(bond);
        }
        Ok(Self {
            sequence: seq.clone(),
            tau,
            nearest,
            hyperlevels: hyperlevels.into_iter().map(Option::unwrap).collect(),
            bonds: bonds.into_iter().map(Option::unwrap).collect(),
            vertex_maps,
        })
    }

    pub fn sequence(&self) -> &AdjustedSequence {
        &self.sequence
    }

    pub fn depth(&self) -> usize {
        self.hyperlevels.len()
    }

    /// Absolute tie tolerance used by the nearest-point maps.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `q_n` for 1-based `n`.
    pub fn nearest(&self, n: usize) -> &MultiMap {
        &self.nearest[n - 1]
    }

    pub fn nearest_maps(&self) -> &[MultiMap] {
        &self.nearest
    }

    /// Hyperlevel of 1-based level `n`.
    pub fn hyperlevel(&self, n: usize) -> &HyperLevel {
        &self.hyperlevels[n - 1]
    }

    pub fn hyperlevels(&self) -> &[HyperLevel] {
        &self.hyperlevels
    }

    /// Bonding map `p_{n-1,n}` on the elements of level `n >= 2`.
    pub fn bond(&self, n: usize) -> &MultiMap {
        &self.bonds[n - 2]
    }

    /// Element ids in level `n - 1` of the bonding images of level `n >= 2`.
    pub fn vertex_map(&self, n: usize) -> &[u32] {
        &self.vertex_maps[n - 2]
    }

    /// Composite vertex map from level `m` down to level `n <= m`.
    pub fn composite_vertex_map(&self, n: usize, m: usize) -> Vec<u32> {
        let mut map: Vec<u32> = (0..self.hyperlevel(m).len() as u32).collect();
        for k in ((n + 1)..=m).rev() {
            let step = self.vertex_map(k);
            map.iter_mut().for_each(|v| *v = step[*v as usize]);
        }
        map
    }
}
