//! The nearest-point maps as a representative of the identity, and the
//! homotopy-commutative square formed with the bonding maps.

use rayon::prelude::*;

use super::{check_homotopic_in_u, HomotopyError, HomotopyWitness};
use crate::construction::AdjustedSequence;
use crate::format_real;
use crate::hyperspace::{union_of, MapDomain, MultiMap};

/// Verdict for one bound `b` of the schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub label: String,
    pub bound: f64,
    /// Smallest `n` such that `q_k ≃ q_{k+1}` in `U_b` for every stored
    /// `k >= n`. Equals the depth when no stored pair passes from some point
    /// on, in which case the claim is only vacuously witnessed.
    pub consecutive_n0: usize,
    /// Whether at least one stored pair witnesses the consecutive condition.
    pub consecutive_witnessed: bool,
    /// Smallest `n` such that `q_k` is homotopic in `U_b` to `x -> {x}` for
    /// every stored `k >= n`; `None` when even the last level fails.
    pub inclusion_n0: Option<usize>,
}

/// A union diameter that is not below `2 epsilon_n` at its own level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityViolation {
    pub n: usize,
    /// `"consecutive"` or `"inclusion"`.
    pub condition: &'static str,
    pub diameter: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityMorphismReport {
    /// `max_x diam(q_n(x) ∪ q_{n+1}(x))` for `n = 1 .. depth - 1`.
    pub consecutive_diameters: Vec<f64>,
    /// `max_x diam(q_n(x) ∪ {x})` for `n = 1 .. depth`.
    pub inclusion_diameters: Vec<f64>,
    pub bounds: Vec<BoundReport>,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityMorphismReport {
    /// No violation, and every bound has an inclusion index.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.bounds.iter().all(|b| b.inclusion_n0.is_some())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.bounds {
            out.push_str(&format!(
                "bound={} ({}) consecutive_n0={}{} inclusion_n0={}\n",
                format_real(b.bound),
                b.label,
                b.consecutive_n0,
                if b.consecutive_witnessed {
                    ""
                } else {
                    " (vacuous)"
                },
                b.inclusion_n0.map_or_else(
                    || "none (insufficient depth)".to_string(),
                    |n| n.to_string()
                )
            ));
        }
        for v in &self.violations {
            out.push_str(&format!(
                "violation at level {}: {} union diameter {} is not below {}\n",
                v.n,
                v.condition,
                format_real(v.diameter),
                format_real(v.bound)
            ));
        }
        out
    }
}

fn check_maps(seq: &AdjustedSequence, nearest: &[MultiMap]) -> Result<(), HomotopyError> {
    if nearest.len() != seq.depth() {
        return Err(HomotopyError::LengthMismatch {
            maps: nearest.len(),
            betas: seq.depth(),
            nets: seq.depth(),
        });
    }
    if let Some(q) = nearest.iter().find(|q| q.len() != seq.ground().len()) {
        return Err(HomotopyError::DomainMismatch {
            left: q.len(),
            right: seq.ground().len(),
        });
    }
    Ok(())
}

/// Checks that `{q_n}` behaves as the identity on the stored prefix, for the
/// bounds `2 epsilon_n` of every level followed by `extra_bounds`.
///
/// `nearest[n - 1]` must be the nearest-point map of level `n`.
pub fn check_identity_morphism(
    seq: &AdjustedSequence,
    nearest: &[MultiMap],
    extra_bounds: &[f64],
) -> Result<IdentityMorphismReport, HomotopyError> {
    check_maps(seq, nearest)?;
    let ground = seq.ground();
    let depth = seq.depth();
    let consecutive_diameters: Vec<f64> = (0..depth.saturating_sub(1))
        .map(|i| {
            (0..ground.len())
                .into_par_iter()
                .map(|x| ground.union_diameter(nearest[i].image(x), nearest[i + 1].image(x)))
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let inclusion_diameters: Vec<f64> = (0..depth)
        .map(|i| {
            (0..ground.len())
                .into_par_iter()
                .map(|x| ground.union_diameter(nearest[i].image(x), &[x]))
                .reduce(|| 0.0, f64::max)
        })
        .collect();

    let mut violations = Vec::new();
    for (i, level) in seq.levels().iter().enumerate() {
        let own = 2.0 * level.epsilon;
        if let Some(&d) = consecutive_diameters.get(i) {
            if !(d < own) {
                violations.push(IdentityViolation {
                    n: level.index,
                    condition: "consecutive",
                    diameter: d,
                    bound: own,
                });
            }
        }
        if !(inclusion_diameters[i] < own) {
            violations.push(IdentityViolation {
                n: level.index,
                condition: "inclusion",
                diameter: inclusion_diameters[i],
                bound: own,
            });
        }
    }

    let schedule = seq
        .levels()
        .iter()
        .map(|l| (format!("2*epsilon_{}", l.index), 2.0 * l.epsilon))
        .chain(extra_bounds.iter().map(|&b| ("extra".to_string(), b)));
    let bounds = schedule
        .map(|(label, bound)| {
            // walk back from the end while the condition keeps holding
            let mut consecutive_n0 = depth.max(1);
            while consecutive_n0 > 1 && consecutive_diameters[consecutive_n0 - 2] < bound {
                consecutive_n0 -= 1;
            }
            let inclusion_n0 = if depth > 0 && inclusion_diameters[depth - 1] < bound {
                let mut n0 = depth;
                while n0 > 1 && inclusion_diameters[n0 - 2] < bound {
                    n0 -= 1;
                }
                Some(n0)
            } else {
                None
            };
            BoundReport {
                label,
                bound,
                consecutive_witnessed: consecutive_n0 < depth || depth <= 1,
                consecutive_n0,
                inclusion_n0,
            }
        })
        .collect();
    Ok(IdentityMorphismReport {
        consecutive_diameters,
        inclusion_diameters,
        bounds,
        violations,
    })
}

/// Witness that `q_n` and `p_{n,n+1} ∘ q_{n+1}` are homotopic in
/// `U_{2 epsilon_n}(A_n)`.
pub fn check_diagram_commutes(
    seq: &AdjustedSequence,
    nearest: &[MultiMap],
    n: usize,
) -> Result<HomotopyWitness, HomotopyError> {
    check_maps(seq, nearest)?;
    if n == 0 || n + 1 > seq.depth() {
        return Err(HomotopyError::LevelOutOfRange {
            n,
            depth: seq.depth(),
        });
    }
    let ground = seq.ground();
    let (q_n, q_next) = (&nearest[n - 1], &nearest[n]);
    let images: Vec<Vec<usize>> = (0..ground.len())
        .into_par_iter()
        .map(|x| union_of(q_next.image(x).iter().map(|&a| q_n.image(a))))
        .collect();
    let composite = MultiMap::new(MapDomain::Ground, images, ground)?;
    let bound = 2.0 * seq.level(n).expect("checked range").epsilon;
    check_homotopic_in_u(format!("diagram_{n}"), q_n, &composite, ground, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_adjusted_sequence, SequenceParams};
    use crate::hyperspace::nearest_point_map;
    use crate::metric::{MetricGround, SpaceRegistry, SpaceSpec};
    use std::sync::Arc;

    fn maps(seq: &AdjustedSequence, tau: f64) -> Vec<MultiMap> {
        seq.levels()
            .iter()
            .map(|l| nearest_point_map(seq.ground(), &l.net, tau).unwrap())
            .collect()
    }

    #[test]
    fn singleton_ground() {
        let g = Arc::new(MetricGround::from_coords(vec![vec![0.0]], 0.0).unwrap());
        let seq =
            build_adjusted_sequence(g, &SequenceParams::new(1.0, 3, 0.9).with_net_ratio(0.45))
                .unwrap();
        let q = maps(&seq, 0.0);
        let report = check_identity_morphism(&seq, &q, &[0.01]).unwrap();
        assert!(report.passed());
        for b in &report.bounds {
            assert_eq!(b.consecutive_n0, 1);
            assert_eq!(b.inclusion_n0, Some(1));
        }
        let w = check_diagram_commutes(&seq, &q, 1).unwrap();
        assert!(w.passed);
        assert_eq!(w.max_union_diameter, 0.0);
    }

    #[test]
    fn four_point_circle_square() {
        let g = Arc::new(
            SpaceRegistry::with_builtins()
                .generate(&SpaceSpec::new("circle").samples(4))
                .unwrap()
                .with_density(0.0)
                .unwrap(),
        );
        let seq = build_adjusted_sequence(g, &SequenceParams::new(1.5, 2, 0.9).with_net_ratio(1.0))
            .unwrap();
        let q = maps(&seq, 1e-9);
        let w = check_diagram_commutes(&seq, &q, 1).unwrap();
        assert!(w.passed);
        // q_1(p1) = {p0, p2} is an antipodal pair
        assert!((w.max_union_diameter - 2.0).abs() < 1e-12);
        assert!(w.max_union_diameter < 3.0);
        assert!(check_diagram_commutes(&seq, &q, 2).is_err());
    }

    #[test]
    fn circle_schedule_indices() {
        let g = Arc::new(
            SpaceRegistry::with_builtins()
                .generate(&SpaceSpec::new("circle").samples(128))
                .unwrap(),
        );
        let seq = build_adjusted_sequence(g, &SequenceParams::new(1.0, 4, 0.9)).unwrap();
        let q = maps(&seq, 1e-9);
        let report = check_identity_morphism(&seq, &q, &[]).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        for (k, b) in report.bounds.iter().enumerate() {
            assert!(b.consecutive_n0 <= k + 1);
            assert!(b.inclusion_n0.unwrap() <= k + 1);
        }
        let tiny = check_identity_morphism(&seq, &q, &[0.0]).unwrap();
        assert_eq!(tiny.bounds.last().unwrap().inclusion_n0, None);
        assert!(!tiny.passed());
    }
}
