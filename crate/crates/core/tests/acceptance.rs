//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one `PASS` or `FAIL` line. The test fails if any criterion fails.
//!
//! The verdict lines go straight to the stderr handle, so they show up in
//! plain `cargo test` output without `--nocapture`.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use finiteshape::construction::{
    build_adjusted_sequence, build_net, AdjustedSequence, SequenceParams,
};
use finiteshape::homotopy::{
    check_diagram_commutes, check_homotopic_in_u, check_identity_morphism, finite_type_convert,
    ApproximativeMap,
};
use finiteshape::hyperspace::{
    composite_bonding, element_ids, is_continuous, verify_lemma1, MapDomain, MultiMap,
};
use finiteshape::invariants::{
    betti, chain_map_matrix, order_complex, rips_complex, shape_report_for_tower, HomologyReport,
    ShapeOptions,
};
use finiteshape::metric::{MetricGround, SpaceRegistry, SpaceSpec};
use finiteshape::tower::{Tower, TowerOptions};

const DEPTH: usize = 4;
const SAFETY: f64 = 0.9;
const SIMPLEX_BUDGET: usize = 20_000_000;

struct Space {
    name: &'static str,
    sequence: AdjustedSequence,
    tower: Tower,
    /// Seconds spent generating the ground and building the sequence.
    sequence_secs: f64,
    /// Seconds spent building the tower.
    tower_secs: f64,
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn acceptance_specs() -> Vec<(&'static str, SpaceSpec)> {
    vec![
        ("circle(256)", SpaceSpec::new("circle").samples(256)),
        ("interval(200)", SpaceSpec::new("interval").samples(200)),
        ("two_points", SpaceSpec::new("two_points")),
        ("cantor(depth 4)", SpaceSpec::new("cantor").depth(4)),
        (
            "warsaw_circle(2000)",
            SpaceSpec::new("warsaw_circle").samples(2000),
        ),
    ]
}

fn build_spaces() -> Vec<Space> {
    let registry = SpaceRegistry::with_builtins();
    acceptance_specs()
        .into_iter()
        .map(|(name, spec)| {
            let start = Instant::now();
            let ground = Arc::new(registry.generate(&spec).expect("generator runs"));
            let epsilon1 = ground.diameter() / 2.0;
            let sequence =
                build_adjusted_sequence(ground, &SequenceParams::new(epsilon1, DEPTH, SAFETY))
                    .expect("sequence builds");
            let sequence_secs = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let tower = Tower::build(&sequence, &TowerOptions::default()).expect("tower builds");
            Space {
                name,
                sequence,
                tower,
                sequence_secs,
                tower_secs: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// 1. Strict adjustment inequalities with positive slack, depth at least 4,
///    under 10 s per space.
fn criterion_1(spaces: &[Space]) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in spaces {
        let seq = &s.sequence;
        let levels = seq.levels();
        let gamma_ok = levels.iter().all(|l| l.gamma < l.epsilon);
        let adjusted_ok = levels
            .windows(2)
            .all(|w| w[1].epsilon < (w[0].epsilon - w[0].gamma) / 2.0);
        let gamma_slack = seq.gamma_slack().into_iter().fold(f64::INFINITY, f64::min);
        let adjust_slack = seq
            .adjustment_slack()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let ok = gamma_ok
            && adjusted_ok
            && seq.violations().is_empty()
            && gamma_slack > 0.0
            && adjust_slack > 0.0
            && seq.depth() >= DEPTH
            && s.sequence_secs < 10.0;
        passed &= ok;
        parts.push(format!(
            "{}: depth {} gamma slack {:.3e} adjust slack {:.3e} {:.2}s",
            s.name,
            seq.depth(),
            gamma_slack,
            adjust_slack,
            s.sequence_secs
        ));
    }
    Verdict::new(passed, parts.join("; "))
}

/// 2. All three distance estimates over every point and level pair, no
///    violation, under 60 s in total.
fn criterion_2(spaces: &[Space]) -> Verdict {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for s in spaces {
        let report = verify_lemma1(&s.sequence, s.tower.tau()).expect("lemma check runs");
        let violations: usize = report.clauses.iter().map(|c| c.violation_count).sum();
        let instances: usize = report.clauses.iter().map(|c| c.instances).sum();
        passed &= report.passed() && report.clauses.len() == 3 && violations == 0;
        parts.push(format!(
            "{}: {} pairs {} instances {} violations",
            s.name, report.level_pairs, instances, violations
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs < 60.0;
    Verdict::new(passed, format!("{} ({secs:.2}s)", parts.join("; ")))
}

/// 3. Every bonding map and every composite is monotone on all comparable
///    pairs.
fn criterion_3(spaces: &[Space]) -> Verdict {
    let mut passed = true;
    let mut maps = 0;
    let mut pairs = 0;
    let mut failures = Vec::new();
    for s in spaces {
        let t = &s.tower;
        let ground = s.sequence.ground();
        for n in 1..t.depth() {
            for m in (n + 1)..=t.depth() {
                let chain: Vec<_> = (n..=m).map(|k| t.hyperlevel(k)).collect();
                let bonds: Vec<_> = ((n + 1)..=m).map(|k| t.bond(k)).collect();
                let map = composite_bonding(ground, &chain, &bonds).expect("composite exists");
                if m == n + 1 && map.images() != t.bond(m).images() {
                    passed = false;
                    failures.push(format!("{} p_{n},{m} differs from its bond", s.name));
                }
                match is_continuous(&map, t.hyperlevel(m)).expect("domain matches") {
                    finiteshape::hyperspace::Continuity::Monotone { pairs: p } => pairs += p,
                    finiteshape::hyperspace::Continuity::Violation { smaller, larger } => {
                        passed = false;
                        failures.push(format!("{} p_{n},{m} at ({smaller},{larger})", s.name));
                    }
                }
                maps += 1;
            }
        }
    }
    let mut detail = format!("{maps} maps, {pairs} comparable pairs checked");
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join(", ")));
    }
    Verdict::new(passed, detail)
}

/// 4. For each bound `2 epsilon_n` both indices are at most `n`.
fn criterion_4(spaces: &[Space]) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in spaces {
        let report = check_identity_morphism(&s.sequence, s.tower.nearest_maps(), &[])
            .expect("identity check runs");
        let mut ok = report.bounds.len() == s.sequence.depth();
        for (b, n) in report.bounds.iter().zip(1..) {
            ok &= b.consecutive_n0 <= n && b.inclusion_n0.is_some_and(|n0| n0 <= n);
        }
        passed &= ok;
        let indices: Vec<String> = report
            .bounds
            .iter()
            .map(|b| format!("{}/{}", b.consecutive_n0, b.inclusion_n0.unwrap_or(0)))
            .collect();
        parts.push(format!("{}: n0 {}", s.name, indices.join(" ")));
    }
    Verdict::new(passed, parts.join("; "))
}

/// 5. The square commutes up to homotopy at every level with worst union
///    diameter strictly below `2 epsilon_n`.
fn criterion_5(spaces: &[Space]) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in spaces {
        let mut worst_ratio: f64 = 0.0;
        for n in 1..s.sequence.depth() {
            let w = check_diagram_commutes(&s.sequence, s.tower.nearest_maps(), n)
                .expect("diagram check runs");
            let bound = 2.0 * s.sequence.level(n).unwrap().epsilon;
            passed &= w.passed && w.max_union_diameter < bound && w.bound == bound;
            worst_ratio = worst_ratio.max(w.max_union_diameter / bound);
        }
        parts.push(format!("{}: worst diameter/bound {worst_ratio:.3}", s.name));
    }
    Verdict::new(passed, parts.join("; "))
}

/// 6. Finite-type conversion of a hand-built approximative map on a circle
///    of 64 points: balls of radius `D_n / 2` around a point that moves by
///    fewer steps at each index.
fn criterion_6() -> Verdict {
    let circle = Arc::new(
        SpaceRegistry::with_builtins()
            .generate(&SpaceSpec::new("circle").samples(64))
            .unwrap(),
    );
    let points = circle.len();
    let stored = 6;
    let epsilon = 0.5;
    let maps: Vec<MultiMap> = (1..=stored)
        .map(|n| {
            let d_n = 0.5f64.powi(n as i32);
            let shift = (8.0 * 0.5f64.powi(n as i32 - 1)).floor() as usize;
            let images = (0..points)
                .map(|x| {
                    let centre = (x + shift) % points;
                    (0..points)
                        .filter(|&y| circle.dist(centre, y) < d_n / 2.0)
                        .collect()
                })
                .collect();
            MultiMap::new(MapDomain::Ground, images, &circle).unwrap()
        })
        .collect();
    let f = ApproximativeMap::new(Arc::clone(&circle), maps).unwrap();
    let betas: Vec<f64> = (1..=stored).map(|n| 0.4 * 0.5f64.powi(n as i32)).collect();
    let nets: Vec<Vec<usize>> = betas.iter().map(|&b| build_net(&circle, b)).collect();
    let converted = finite_type_convert(&f, &betas, &nets, 0.0).unwrap();

    let mut passed = converted.len() == stored;
    let mut homotopy_checks = 0;
    let mut parts = Vec::new();
    for n in 1..=stored {
        let k = n - 1;
        let d_n = 0.5f64.powi(n as i32);
        let original = f.term(n);
        let term = converted.term(n);
        let inside = term.images().iter().all(|image| {
            !image.is_empty() && image.iter().all(|y| nets[k].binary_search(y).is_ok())
        });
        let diameter = term.recompute_diameter(&circle);
        let bound = 2.0 * betas[k] + d_n;
        passed &= inside && original.recompute_diameter(&circle) <= d_n && diameter < bound;
        if bound < epsilon {
            let w =
                check_homotopic_in_u(format!("finite_type_{n}"), original, term, &circle, epsilon)
                    .unwrap();
            passed &= w.passed;
            homotopy_checks += 1;
        }
        parts.push(format!("n={n}: diam {diameter:.4} < {bound:.4}"));
    }
    passed &= homotopy_checks > 0;
    Verdict::new(
        passed,
        format!(
            "{}; {homotopy_checks} homotopy checks at epsilon 0.5",
            parts.join(", ")
        ),
    )
}

/// Number of Cantor generations whose gap `3^-k` exceeds `scale`.
fn cantor_generations_above(scale: f64, depth: usize) -> u32 {
    (1..=depth as i32)
        .filter(|&k| 3f64.powi(-k) > scale)
        .count() as u32
}

/// 7. Stabilized ranks against the known shape invariants, under 2 min in
///    total.
fn criterion_7(spaces: &[Space]) -> (Verdict, Vec<HomologyReport>) {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    let mut reports = Vec::new();
    let mut tower_secs = 0.0;
    for s in spaces {
        tower_secs += s.tower_secs;
        let report = shape_report_for_tower(&s.tower, &ShapeOptions::default()).unwrap();
        let expected: Vec<usize> = match s.name {
            "circle(256)" | "warsaw_circle(2000)" => vec![1, 1],
            "interval(200)" => vec![1, 0],
            "two_points" => vec![2, 0],
            _ => {
                // each level's components follow the generations whose gap
                // exceeds twice the radius
                let levels = s.sequence.levels();
                let components =
                    |n: usize| 1usize << cantor_generations_above(2.0 * levels[n - 1].epsilon, 4);
                for level in &report.levels {
                    passed &= level.betti == vec![components(level.n), 0];
                }
                for pair in &report.pairs {
                    passed &= pair.ranks == vec![components(pair.coarse), 0];
                }
                vec![components(s.sequence.depth() - 1), 0]
            }
        };
        passed &= report.stabilized == expected;
        parts.push(format!(
            "{}: stabilized {:?} expected {:?}",
            s.name, report.stabilized, expected
        ));
        reports.push(report);
    }
    let secs = start.elapsed().as_secs_f64() + tower_secs;
    passed &= secs < 120.0;
    (
        Verdict::new(passed, format!("{} ({secs:.2}s)", parts.join("; "))),
        reports,
    )
}

/// 8. Order complex and Rips complex have the same Betti numbers at every
///    level.
fn criterion_8(spaces: &[Space]) -> Verdict {
    let mut passed = true;
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for s in spaces {
        for level in s.sequence.levels() {
            let order = order_complex(s.tower.hyperlevel(level.index), 2, SIMPLEX_BUDGET).unwrap();
            let rips = rips_complex(s.sequence.ground(), level, 2, SIMPLEX_BUDGET).unwrap();
            let (a, b) = (betti(&order, 1).unwrap(), betti(&rips, 1).unwrap());
            if a != b {
                passed = false;
                mismatches.push(format!("{} level {}: {a:?} vs {b:?}", s.name, level.index));
            }
            compared += 1;
        }
    }
    let mut detail = format!("{compared} levels compared");
    if !mismatches.is_empty() {
        detail.push_str(&format!("; mismatches: {}", mismatches.join(", ")));
    }
    Verdict::new(passed, detail)
}

/// 9. Chain maps of composites equal products of step matrices on small
///    instances (nets of at most 12 points over 3 levels).
fn criterion_9() -> Verdict {
    let registry = SpaceRegistry::with_builtins();
    let small: Vec<(&str, MetricGround)> = vec![
        (
            "circle(12)",
            registry
                .generate(&SpaceSpec::new("circle").samples(12))
                .unwrap(),
        ),
        (
            "interval(12)",
            registry
                .generate(&SpaceSpec::new("interval").samples(12))
                .unwrap(),
        ),
        (
            "cantor(depth 2)",
            registry
                .generate(&SpaceSpec::new("cantor").depth(2))
                .unwrap(),
        ),
        (
            "two_points",
            registry.generate(&SpaceSpec::new("two_points")).unwrap(),
        ),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, ground) in small {
        let ground = Arc::new(ground.with_density(0.0).unwrap());
        let epsilon1 = ground.diameter() / 2.0;
        let seq = build_adjusted_sequence(
            Arc::clone(&ground),
            &SequenceParams::new(epsilon1, 3, SAFETY),
        )
        .unwrap();
        let options = TowerOptions::for_degree(2);
        let tower = Tower::build(&seq, &options).unwrap();
        passed &= seq.depth() == 3 && seq.levels().iter().all(|l| l.net.len() <= 12);
        let complexes: Vec<_> = tower
            .hyperlevels()
            .iter()
            .map(|h| order_complex(h, 2, SIMPLEX_BUDGET).unwrap())
            .collect();
        // composite computed from the bonds directly, then located in level 1
        let chain: Vec<_> = tower.hyperlevels().iter().collect();
        let bonds = [tower.bond(2), tower.bond(3)];
        let composite = composite_bonding(&ground, &chain, &bonds).unwrap();
        let composite_ids = element_ids(&composite, tower.hyperlevel(1)).unwrap();
        let mut entries = 0;
        for d in 0..=2 {
            let step_32 =
                chain_map_matrix(&complexes[2], &complexes[1], tower.vertex_map(3), d).unwrap();
            let step_21 =
                chain_map_matrix(&complexes[1], &complexes[0], tower.vertex_map(2), d).unwrap();
            let direct = chain_map_matrix(&complexes[2], &complexes[0], &composite_ids, d).unwrap();
            passed &= step_21.multiply(&step_32).unwrap() == direct;
            entries += direct.nonzeros();
        }
        let sizes: Vec<usize> = seq.levels().iter().map(|l| l.net.len()).collect();
        parts.push(format!("{name}: nets {sizes:?}, {entries} nonzeros"));
    }
    Verdict::new(passed, parts.join("; "))
}

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    let spaces = build_spaces();
    let (seventh, _) = criterion_7(&spaces);
    let verdicts = [
        ("main construction inequalities", criterion_1(&spaces)),
        ("distance lemma, exhaustive", criterion_2(&spaces)),
        (
            "continuity of bonding maps and composites",
            criterion_3(&spaces),
        ),
        (
            "nearest-point maps represent the identity",
            criterion_4(&spaces),
        ),
        (
            "homotopy-commutative square at every level",
            criterion_5(&spaces),
        ),
        ("finite-type conversion", criterion_6()),
        ("stabilized ranks match shape invariants", seventh),
        ("order complex and Rips complex agree", criterion_8(&spaces)),
        ("chain-level functoriality", criterion_9()),
    ];
    let mut out = std::io::stderr().lock();
    for (k, (title, verdict)) in verdicts.iter().enumerate() {
        writeln!(
            out,
            "criterion {} {} {title}: {}",
            k + 1,
            if verdict.passed { "PASS" } else { "FAIL" },
            verdict.detail
        )
        .unwrap();
    }
    writeln!(out, "total {:.2}s", start.elapsed().as_secs_f64()).unwrap();
    drop(out);
    let failed: Vec<usize> = verdicts
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| !v.passed)
        .map(|(k, _)| k + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
