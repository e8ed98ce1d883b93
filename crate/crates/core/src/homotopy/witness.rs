//! The union-map witness.

use rayon::prelude::*;

use super::HomotopyError;
use crate::format_real;
use crate::hyperspace::{argmax, MultiMap};
use crate::metric::MetricGround;

/// Evidence that `f` and `g` are homotopic inside `U_bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyWitness {
    pub check: String,
    pub bound: f64,
    /// `diam(f(x) ∪ g(x))` per domain item.
    pub union_diameters: Vec<f64>,
    pub max_union_diameter: f64,
    pub worst_item: usize,
    pub passed: bool,
}

impl HomotopyWitness {
    /// `bound - max_union_diameter`; positive exactly when passed.
    pub fn slack(&self) -> f64 {
        self.bound - self.max_union_diameter
    }

    /// One structured line: check, bound, max union diameter, slack, worst
    /// item and verdict.
    pub fn to_line(&self) -> String {
        format!(
            "check={} bound={} max_union_diameter={} slack={} worst_item={} verdict={}",
            self.check,
            format_real(self.bound),
            format_real(self.max_union_diameter),
            format_real(self.slack()),
            self.worst_item,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Measures `diam(f(x) ∪ g(x))` in `target` for every domain item; passes
/// when all are strictly below `bound`.
pub fn check_homotopic_in_u(
    check: impl Into<String>,
    f: &MultiMap,
    g: &MultiMap,
    target: &MetricGround,
    bound: f64,
) -> Result<HomotopyWitness, HomotopyError> {
    if f.len() != g.len() || f.domain() != g.domain() {
        return Err(HomotopyError::DomainMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let union_diameters: Vec<f64> = f
        .images()
        .par_iter()
        .zip(g.images())
        .map(|(a, b)| target.union_diameter(a, b))
        .collect();
    let worst_item = argmax(&union_diameters);
    let max_union_diameter = union_diameters.get(worst_item).copied().unwrap_or(0.0);
    Ok(HomotopyWitness {
        check: check.into(),
        bound,
        passed: max_union_diameter < bound,
        union_diameters,
        max_union_diameter,
        worst_item,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperspace::MapDomain;

    fn interval() -> MetricGround {
        MetricGround::from_coords((0..=10).map(|i| vec![i as f64 / 10.0]).collect(), 0.0).unwrap()
    }

    #[test]
    fn equal_maps_measure_their_own_diameter() {
        let g = interval();
        let f = MultiMap::new(
            MapDomain::Ground,
            (0..11).map(|x| vec![x, 10 - x]).collect(),
            &g,
        )
        .unwrap();
        let w = check_homotopic_in_u("same", &f, &f, &g, 1.5).unwrap();
        assert!(w.passed);
        assert_eq!(w.max_union_diameter, f.diameter());
        assert!(
            !check_homotopic_in_u("same", &f, &f, &g, 1.0)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn opposite_ends_fail() {
        let g = interval();
        let f = MultiMap::new(MapDomain::Ground, vec![vec![0]; 11], &g).unwrap();
        let h = MultiMap::new(MapDomain::Ground, vec![vec![10]; 11], &g).unwrap();
        let w = check_homotopic_in_u("ends", &f, &h, &g, 0.5).unwrap();
        assert!(!w.passed);
        assert_eq!(w.max_union_diameter, 1.0);
        assert_eq!(w.worst_item, 0);
        assert!(w.to_line().ends_with("verdict=FAIL"));
        let short = MultiMap::new(MapDomain::Ground, vec![vec![0]; 3], &g).unwrap();
        assert!(check_homotopic_in_u("x", &f, &short, &g, 1.0).is_err());
    }
}
