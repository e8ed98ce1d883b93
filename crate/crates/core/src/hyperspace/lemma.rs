//! Exhaustive check of the distance estimates that make the bonding maps land
//! in the coarser hyperlevel.
//!
//! For levels `n < m` of an adjusted sequence and every ground point `x`:
//!
//! 1. `d(a_n, a_m) < epsilon_n` for `a_n in q_n(x)`, `a_m in q_m(x)`;
//! 2. `d(a_n, a_m) < epsilon_n` for `a_m in A_m`, `a_n in p_{n,m}({a_m})`;
//! 3. `d(a_n, x) < epsilon_n` for `a_n in p_{n,m}(q_m(x))`.

use std::fmt;

use rayon::prelude::*;

use super::{nearest_point_map, union_of, HyperspaceError, MultiMap};
use crate::construction::AdjustedSequence;

/// Violations kept per clause; the total count is always exact.
const KEPT_VIOLATIONS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaClause {
    NearestPoints,
    BondedSingletons,
    BondedNearestPoints,
}

impl LemmaClause {
    pub const ALL: [LemmaClause; 3] = [
        LemmaClause::NearestPoints,
        LemmaClause::BondedSingletons,
        LemmaClause::BondedNearestPoints,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LemmaClause::NearestPoints => "i",
            LemmaClause::BondedSingletons => "ii",
            LemmaClause::BondedNearestPoints => "iii",
        }
    }
}

impl fmt::Display for LemmaClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One failing instance with its witnesses (ground indices).
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaViolation {
    pub clause: LemmaClause,
    pub n: usize,
    pub m: usize,
    /// Ground point the instance was generated from (clauses i and iii).
    pub x: Option<usize>,
    pub a_n: usize,
    /// Fine net point (clauses i and ii).
    pub a_m: Option<usize>,
    pub distance: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClauseReport {
    pub clause: LemmaClause,
    pub instances: usize,
    /// Smallest `epsilon_n - distance` over all instances.
    pub min_slack: f64,
    /// Largest `distance / epsilon_n` over all instances.
    pub max_ratio: f64,
    pub violation_count: usize,
    /// Whether every violation involves non-consecutive levels.
    pub only_non_consecutive: bool,
    /// The first few violations.
    pub violations: Vec<LemmaViolation>,
}

impl ClauseReport {
    fn empty(clause: LemmaClause) -> Self {
        Self {
            clause,
            instances: 0,
            min_slack: f64::INFINITY,
            max_ratio: 0.0,
            violation_count: 0,
            only_non_consecutive: true,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, v: LemmaViolation) {
        self.violation_count += 1;
        if v.m == v.n + 1 {
            self.only_non_consecutive = false;
        }
        if self.violations.len() < KEPT_VIOLATIONS {
            self.violations.push(v);
        }
    }

    fn observe(&mut self, distance: f64, bound: f64) {
        self.instances += 1;
        self.min_slack = self.min_slack.min(bound - distance);
        self.max_ratio = self.max_ratio.max(distance / bound);
    }

    fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.min_slack = self.min_slack.min(other.min_slack);
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self.violation_count += other.violation_count;
        self.only_non_consecutive &= other.only_non_consecutive;
        let room = KEPT_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations
            .extend(other.violations.into_iter().take(room));
        self
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub clauses: Vec<ClauseReport>,
    pub level_pairs: usize,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(ClauseReport::passed)
    }

    pub fn clause(&self, clause: LemmaClause) -> &ClauseReport {
        self.clauses
            .iter()
            .find(|c| c.clause == clause)
            .expect("every clause is reported")
    }
}

/// Checks the three clauses over every ground point and every pair of levels
/// `n < m`. Violations are reported, not raised.
pub fn verify_lemma1(seq: &AdjustedSequence, tau: f64) -> Result<Lemma1Report, HyperspaceError> {
    let ground = seq.ground();
    let levels = seq.levels();
    let q: Vec<MultiMap> = levels
        .iter()
        .map(|l| nearest_point_map(ground, &l.net, tau))
        .collect::<Result<_, _>>()?;
    let mut reports: Vec<ClauseReport> = LemmaClause::ALL
        .iter()
        .map(|&c| ClauseReport::empty(c))
        .collect();
    let mut level_pairs = 0;

    for ni in 0..levels.len() {
        let eps = levels[ni].epsilon;
        let n = levels[ni].index;
        // bonded[a] = p_{n,m}({a}) for a in A_m, grown one level at a time.
        let mut bonded: Vec<Vec<usize>> = vec![Vec::new(); ground.len()];
        for mi in (ni + 1)..levels.len() {
            level_pairs += 1;
            let m = levels[mi].index;
            let fine_net = &levels[mi].net;
            let next: Vec<Vec<usize>> = {
                let mut next = vec![Vec::new(); ground.len()];
                for &a in fine_net {
                    next[a] = if mi == ni + 1 {
                        q[ni].image(a).to_vec()
                    } else {
                        union_of(q[mi - 1].image(a).iter().map(|&b| bonded[b].as_slice()))
                    };
                }
                next
            };
            bonded = next;

            let mut clause2 = ClauseReport::empty(LemmaClause::BondedSingletons);
            for &a_m in fine_net {
                for &a_n in &bonded[a_m] {
                    let d = ground.dist(a_n, a_m);
                    clause2.observe(d, eps);
                    if !(d < eps) {
                        clause2.record(LemmaViolation {
                            clause: LemmaClause::BondedSingletons,
                            n,
                            m,
                            x: None,
                            a_n,
                            a_m: Some(a_m),
                            distance: d,
                            bound: eps,
                        });
                    }
                }
            }

            let (clause1, clause3) = (0..ground.len())
                .into_par_iter()
                .fold(
                    || {
                        (
                            ClauseReport::empty(LemmaClause::NearestPoints),
                            ClauseReport::empty(LemmaClause::BondedNearestPoints),
                        )
                    },
                    |(mut c1, mut c3), x| {
                        for &a_n in q[ni].image(x) {
                            for &a_m in q[mi].image(x) {
                                let d = ground.dist(a_n, a_m);
                                c1.observe(d, eps);
                                if !(d < eps) {
                                    c1.record(LemmaViolation {
                                        clause: LemmaClause::NearestPoints,
                                        n,
                                        m,
                                        x: Some(x),
                                        a_n,
                                        a_m: Some(a_m),
                                        distance: d,
                                        bound: eps,
                                    });
                                }
                            }
                        }
                        let image = union_of(q[mi].image(x).iter().map(|&a| bonded[a].as_slice()));
                        for a_n in image {
                            let d = ground.dist(a_n, x);
                            c3.observe(d, eps);
                            if !(d < eps) {
                                c3.record(LemmaViolation {
                                    clause: LemmaClause::BondedNearestPoints,
                                    n,
                                    m,
                                    x: Some(x),
                                    a_n,
                                    a_m: None,
                                    distance: d,
                                    bound: eps,
                                });
                            }
                        }
                        (c1, c3)
                    },
                )
                .reduce(
                    || {
                        (
                            ClauseReport::empty(LemmaClause::NearestPoints),
                            ClauseReport::empty(LemmaClause::BondedNearestPoints),
                        )
                    },
                    |(a1, a3), (b1, b3)| (a1.merge(b1), a3.merge(b3)),
                );
            let mut drained = std::mem::take(&mut reports).into_iter();
            let r1 = drained.next().unwrap().merge(clause1);
            let r2 = drained.next().unwrap().merge(clause2);
            let r3 = drained.next().unwrap().merge(clause3);
            reports = vec![r1, r2, r3];
        }
    }
    Ok(Lemma1Report {
        clauses: reports,
        level_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_adjusted_sequence, BuildStatus, Level, SequenceParams};
    use crate::metric::{MetricGround, SpaceRegistry, SpaceSpec};
    use std::sync::Arc;

    #[test]
    fn singleton_ground_passes_with_zero_distances() {
        let g = Arc::new(MetricGround::from_coords(vec![vec![0.0]], 0.0).unwrap());
        let seq =
            build_adjusted_sequence(g, &SequenceParams::new(1.0, 3, 0.9).with_net_ratio(0.45))
                .unwrap();
        let report = verify_lemma1(&seq, 0.0).unwrap();
        assert!(report.passed());
        assert_eq!(report.level_pairs, 3);
        for c in &report.clauses {
            assert_eq!(c.max_ratio, 0.0);
        }
    }

    #[test]
    fn four_point_circle_passes() {
        let g = Arc::new(
            SpaceRegistry::with_builtins()
                .generate(&SpaceSpec::new("circle").samples(4))
                .unwrap()
                .with_density(0.0)
                .unwrap(),
        );
        let seq = build_adjusted_sequence(g, &SequenceParams::new(1.5, 2, 0.9).with_net_ratio(1.0))
            .unwrap();
        let report = verify_lemma1(&seq, 1e-9).unwrap();
        assert!(report.passed(), "{report:?}");
        // q_1(p1) = {p0, p2} and q_2(p1) = {p1}: distance sqrt 2 < 1.5.
        let c1 = report.clause(LemmaClause::NearestPoints);
        assert!((c1.max_ratio - 2f64.sqrt() / 1.5).abs() < 1e-12);
        assert!(c1.min_slack > 0.0);
    }

    #[test]
    fn unadjusted_sequence_is_caught() {
        let g = Arc::new(
            MetricGround::from_coords((0..=10).map(|i| vec![i as f64 / 10.0]).collect(), 0.0)
                .unwrap(),
        );
        let levels = vec![
            Level {
                index: 1,
                epsilon: 0.3,
                net: vec![0, 10],
                gamma: 0.5,
            },
            Level {
                index: 2,
                epsilon: 0.1,
                net: (0..=10).collect(),
                gamma: 0.0,
            },
        ];
        let seq = AdjustedSequence::from_parts(g, levels, 0.9, BuildStatus::Complete).unwrap();
        let report = verify_lemma1(&seq, 1e-12).unwrap();
        assert!(!report.passed());
        let c1 = report.clause(LemmaClause::NearestPoints);
        assert!(c1.violation_count > 0);
        assert!(!c1.only_non_consecutive);
        assert_eq!(c1.violations[0].n, 1);
    }
}
