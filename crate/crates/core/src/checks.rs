//! Verification checks behind a common trait, registered by name.
//!
//! Each check inspects an adjusted sequence (and, when it needs one, the
//! tower built from it) and returns one or more [`CheckOutcome`]s. Every
//! outcome renders as a single machine-readable verdict line starting with
//! `PASS` or `FAIL`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::construction::{AdjustedSequence, SequenceViolation};
use crate::format_real;
use crate::homotopy::{check_diagram_commutes, check_identity_morphism};
use crate::hyperspace::{composite_bonding, is_continuous, verify_lemma1, Continuity, MultiMap};
use crate::invariants::{betti, order_complex, rips_complex};
use crate::tower::Tower;
use crate::Result;

/// Inputs shared by all checks.
pub struct CheckContext<'a> {
    pub sequence: &'a AdjustedSequence,
    /// Nearest-point map of every level, `nearest[n - 1] = q_n`.
    pub nearest: &'a [MultiMap],
    /// Absolute tie tolerance of the nearest-point maps.
    pub tau: f64,
    /// The tower, or the reason it could not be built.
    pub tower: std::result::Result<&'a Tower, String>,
    /// Bounds tested in addition to `2 epsilon_n`.
    pub extra_bounds: &'a [f64],
    /// Highest homology degree compared by the barycentric check.
    pub max_degree: usize,
    pub simplex_budget: usize,
}

/// Verdict of one named check instance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Key-value summary shown on the verdict line.
    pub summary: String,
    /// Further lines for the detailed report.
    pub details: Vec<String>,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, summary: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }

    /// `PASS <name> <summary>` or `FAIL <name> <summary>`.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        if self.summary.is_empty() {
            format!("{verdict} {}", self.name)
        } else {
            format!("{verdict} {} {}", self.name, self.summary)
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>>;
}

fn tower_or_fail<'a>(
    ctx: &CheckContext<'a>,
    name: &str,
) -> std::result::Result<&'a Tower, Vec<CheckOutcome>> {
    ctx.tower.clone().map_err(|reason| {
        vec![CheckOutcome::new(
            name,
            false,
            format!("tower unavailable: {reason}"),
        )]
    })
}

/// `gamma_n < epsilon_n` and `epsilon_{n+1} < (epsilon_n - gamma_n)/2`.
pub struct SequenceInequalities;

impl Check for SequenceInequalities {
    fn name(&self) -> &'static str {
        "sequence"
    }

    fn summary(&self) -> &'static str {
        "covering radius below epsilon and adjusted radii at every level"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        let seq = ctx.sequence;
        let (adjustment, covering): (Vec<_>, Vec<_>) = seq
            .violations()
            .into_iter()
            .partition(|v| matches!(v, SequenceViolation::NotAdjusted { .. }));
        let min = |v: Vec<f64>| v.into_iter().fold(f64::INFINITY, f64::min);
        let adjust_slack = if seq.depth() > 1 {
            format_real(min(seq.adjustment_slack()))
        } else {
            "none".to_string()
        };
        let outcomes = [
            (
                "sequence_gamma_below_epsilon",
                format!(
                    "levels={} min_slack={}",
                    seq.depth(),
                    format_real(min(seq.gamma_slack()))
                ),
                covering,
            ),
            (
                "sequence_adjusted",
                format!(
                    "pairs={} min_slack={adjust_slack}",
                    seq.depth().saturating_sub(1)
                ),
                adjustment,
            ),
        ]
        .into_iter()
        .map(|(name, summary, failing)| {
            let failing: Vec<String> = failing.iter().map(ToString::to_string).collect();
            let summary = if failing.is_empty() {
                summary
            } else {
                format!("{summary} violation: {}", failing.join("; "))
            };
            CheckOutcome::new(name, failing.is_empty(), summary).with_details(failing)
        })
        .collect();
        Ok(outcomes)
    }
}

/// The three distance estimates, exhaustively over all points and level
/// pairs.
pub struct DistanceLemma;

impl Check for DistanceLemma {
    fn name(&self) -> &'static str {
        "lemma1"
    }

    fn summary(&self) -> &'static str {
        "distance estimates between nearest points and bonded points"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        let report = verify_lemma1(ctx.sequence, ctx.tau)?;
        Ok(report
            .clauses
            .iter()
            .map(|c| {
                let details = c
                    .violations
                    .iter()
                    .map(|v| {
                        format!(
                            "n={} m={} x={:?} a_n={} a_m={:?} distance={} bound={}",
                            v.n,
                            v.m,
                            v.x,
                            v.a_n,
                            v.a_m,
                            format_real(v.distance),
                            format_real(v.bound)
                        )
                    })
                    .collect();
                CheckOutcome::new(
                    format!("lemma1_{}", c.clause.label()),
                    c.passed(),
                    format!(
                        "level_pairs={} instances={} min_slack={} max_ratio={} violations={}",
                        report.level_pairs,
                        c.instances,
                        format_real(c.min_slack),
                        format_real(c.max_ratio),
                        c.violation_count
                    ),
                )
                .with_details(details)
            })
            .collect())
    }
}

/// Monotonicity of every bonding map and every composite of bonding maps.
pub struct BondContinuity;

impl Check for BondContinuity {
    fn name(&self) -> &'static str {
        "continuity"
    }

    fn summary(&self) -> &'static str {
        "bonding maps and their composites are monotone"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        let tower = match tower_or_fail(ctx, "continuity") {
            Ok(t) => t,
            Err(fail) => return Ok(fail),
        };
        let depth = tower.depth();
        let pairs: Vec<(usize, usize)> = (1..depth)
            .flat_map(|n| ((n + 1)..=depth).map(move |m| (n, m)))
            .collect();
        let ground = ctx.sequence.ground();
        let results = pairs
            .par_iter()
            .map(|&(n, m)| {
                let chain: Vec<_> = (n..=m).map(|k| tower.hyperlevel(k)).collect();
                let bonds: Vec<_> = ((n + 1)..=m).map(|k| tower.bond(k)).collect();
                let map = if m == n + 1 {
                    tower.bond(m).clone()
                } else {
                    composite_bonding(ground, &chain, &bonds)?
                };
                Ok(((n, m), is_continuous(&map, tower.hyperlevel(m))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut checked = 0;
        let mut details = Vec::new();
        for ((n, m), c) in &results {
            match c {
                Continuity::Monotone { pairs } => checked += pairs,
                Continuity::Violation { smaller, larger } => details.push(format!(
                    "p_{n},{m}: element {smaller} below element {larger} but images not nested"
                )),
            }
        }
        let summary = format!(
            "maps={} comparable_pairs={} violations={}",
            results.len(),
            checked,
            details.len()
        );
        Ok(vec![CheckOutcome::new(
            "continuity",
            details.is_empty(),
            summary,
        )
        .with_details(details)])
    }
}

/// The nearest-point maps form a morphism homotopic to the identity.
pub struct IdentityMorphism;

impl Check for IdentityMorphism {
    fn name(&self) -> &'static str {
        "identity_morphism"
    }

    fn summary(&self) -> &'static str {
        "consecutive nearest-point maps are close and close to the inclusion"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        let report = check_identity_morphism(ctx.sequence, ctx.nearest, ctx.extra_bounds)?;
        // for the level bound 2 epsilon_n both indices must be at most n
        let late: Vec<String> = report
            .bounds
            .iter()
            .take(ctx.sequence.depth())
            .zip(1..)
            .filter(|(b, n)| b.consecutive_n0 > *n || b.inclusion_n0.map_or(true, |n0| n0 > *n))
            .map(|(b, n)| {
                format!(
                    "bound {} needs consecutive_n0 <= {n} and inclusion_n0 <= {n}, found {} and {:?}",
                    b.label, b.consecutive_n0, b.inclusion_n0
                )
            })
            .collect();
        let passed = report.passed() && late.is_empty();
        let worst = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let summary = format!(
            "bounds={} max_consecutive_diameter={} max_inclusion_diameter={} violations={}",
            report.bounds.len(),
            format_real(worst(&report.consecutive_diameters)),
            format_real(worst(&report.inclusion_diameters)),
            report.violations.len() + late.len()
        );
        let mut details: Vec<String> = report.to_text().lines().map(str::to_string).collect();
        details.extend(late);
        Ok(vec![CheckOutcome::new(
            "identity_morphism",
            passed,
            summary,
        )
        .with_details(details)])
    }
}

/// Homotopy commutativity of the square formed by consecutive nearest-point
/// maps and the bonding map.
pub struct DiagramCommutes;

impl Check for DiagramCommutes {
    fn name(&self) -> &'static str {
        "diagram"
    }

    fn summary(&self) -> &'static str {
        "q_n and p_{n,n+1} after q_{n+1} are homotopic in U_{2 epsilon_n}"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        (1..ctx.sequence.depth())
            .map(|n| {
                let w = check_diagram_commutes(ctx.sequence, ctx.nearest, n)?;
                Ok(CheckOutcome::new(
                    w.check.clone(),
                    w.passed,
                    format!(
                        "bound={} max_union_diameter={} slack={} worst_item={}",
                        format_real(w.bound),
                        format_real(w.max_union_diameter),
                        format_real(w.slack()),
                        w.worst_item
                    ),
                ))
            })
            .collect()
    }
}

/// Equal Betti numbers of the order complex and the Rips complex per level.
pub struct BarycentricInvariance;

impl Check for BarycentricInvariance {
    fn name(&self) -> &'static str {
        "barycentric"
    }

    fn summary(&self) -> &'static str {
        "order complex and Rips complex have equal Betti numbers"
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        let tower = match tower_or_fail(ctx, "barycentric") {
            Ok(t) => t,
            Err(fail) => return Ok(fail),
        };
        let k = ctx.max_degree;
        let budget = ctx.simplex_budget;
        let ground = ctx.sequence.ground();
        ctx.sequence
            .levels()
            .par_iter()
            .map(|level| {
                let order = betti(
                    &order_complex(tower.hyperlevel(level.index), k + 1, budget)?,
                    k,
                )?;
                let rips = betti(&rips_complex(ground, level, k + 1, budget)?, k)?;
                Ok(CheckOutcome::new(
                    format!("barycentric_{}", level.index),
                    order == rips,
                    format!("order_betti={order:?} rips_betti={rips:?}"),
                ))
            })
            .collect()
    }
}

/// Checks keyed by name, run in registration order.
pub struct CheckRegistry {
    order: Vec<&'static str>,
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self {
            order: Vec::new(),
            checks: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(SequenceInequalities));
        registry.register(Box::new(DistanceLemma));
        registry.register(Box::new(BondContinuity));
        registry.register(Box::new(IdentityMorphism));
        registry.register(Box::new(DiagramCommutes));
        registry.register(Box::new(BarycentricInvariance));
        registry
    }

    /// Adds a check, replacing any check of the same name in place.
    pub fn register(&mut self, check: Box<dyn Check>) {
        let name = check.name();
        if self.checks.insert(name, check).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.get(name).map(AsRef::as_ref)
    }

    /// Names in registration order.
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.order.iter().copied()
    }

    /// Runs the named checks in registration order; unknown names are an
    /// error.
    pub fn run(&self, names: &[String], ctx: &CheckContext<'_>) -> Result<Vec<CheckOutcome>> {
        if let Some(unknown) = names.iter().find(|n| self.get(n).is_none()) {
            return Err(crate::Error::Config(format!(
                "unknown check `{unknown}` (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            )));
        }
        let mut out = Vec::new();
        for name in self.names().filter(|n| names.iter().any(|m| m == n)) {
            out.extend(self.checks[name].run(ctx)?);
        }
        Ok(out)
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
