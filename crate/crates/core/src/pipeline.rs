//! End-to-end orchestration: load or generate a ground, build the adjusted
//! sequence and its tower, run the configured checks, compute the homology
//! report and write the export bundle.
//!
//! Stages run one after another; each stage is data-parallel inside. CSV
//! exports depend only on the configuration and are byte-identical across
//! runs; wall-clock timings appear only in `report.txt`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::checks::{CheckContext, CheckOutcome, CheckRegistry};
use crate::config::{GroundSource, RunConfig, RUN_CHECKS, VERIFY_CHECKS};
use crate::construction::{
    build_adjusted_sequence, read_sequence, sequence_csv, sequence_record, AdjustedSequence,
    BuildStatus,
};
use crate::hyperspace::{nearest_point_map, poset_csv, poset_dot, tie_tolerance, MultiMap};
use crate::invariants::{
    complex_csv, complex_off, element_barycentres, order_complex, rips_complex,
    shape_report_for_tower, HomologyReport, SimplicialComplex,
};
use crate::metric::{
    load_ground as load_ground_file, write_coords_csv, write_distmatrix_csv, MetricGround,
    SpaceRegistry,
};
use crate::tower::Tower;
use crate::{format_real, Error, Result};

/// Everything a `run` or `verify` produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub seed: u64,
    pub sequence: AdjustedSequence,
    pub checks: Vec<CheckOutcome>,
    /// Present after `run`.
    pub homology: Option<HomologyReport>,
    /// Element count of every hyperlevel, when the tower was built.
    pub hyperlevel_sizes: Option<Vec<usize>>,
    /// Stage name and wall-clock seconds.
    pub timings: Vec<(&'static str, f64)>,
    /// Files written, in order.
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    /// All checks passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn verdict_lines(&self) -> Vec<String> {
        self.checks.iter().map(CheckOutcome::line).collect()
    }

    /// Per-level table followed by the check tally and stabilized ranks.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let seq = &self.sequence;
        let _ = writeln!(
            out,
            "ground: {} points, diameter {}, density {}, seed {}",
            seq.ground().len(),
            format_real(seq.ground().diameter()),
            format_real(seq.ground().density()),
            self.seed
        );
        let _ = writeln!(out, "status: {}", status_text(seq.status()));
        let _ = writeln!(
            out,
            "{:>5} {:>16} {:>16} {:>6} {:>9} {:>12} {:>12}",
            "level", "epsilon", "gamma", "net", "elements", "betti", "ranks"
        );
        for level in seq.levels() {
            let n = level.index;
            let elements = self
                .hyperlevel_sizes
                .as_ref()
                .map_or_else(|| "-".to_string(), |s| s[n - 1].to_string());
            let (betti, ranks) = match &self.homology {
                Some(h) => (
                    join(&h.levels[n - 1].betti),
                    h.pairs
                        .iter()
                        .find(|p| p.fine == n)
                        .map_or_else(|| "-".to_string(), |p| join(&p.ranks)),
                ),
                None => ("-".to_string(), "-".to_string()),
            };
            let _ = writeln!(
                out,
                "{:>5} {:>16} {:>16} {:>6} {:>9} {:>12} {:>12}",
                n,
                format!("{:.10}", level.epsilon),
                format!("{:.10}", level.gamma),
                level.net.len(),
                elements,
                betti,
                ranks
            );
        }
        if let Some(h) = &self.homology {
            let _ = writeln!(
                out,
                "stabilized ranks over the last {} levels: {}",
                h.window,
                join(&h.stabilized)
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "checks: {} passed, {} failed",
            self.checks.len() - failed,
            failed
        );
        out
    }
}

fn join(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn status_text(status: &BuildStatus) -> String {
    match status {
        BuildStatus::Complete => "complete".to_string(),
        BuildStatus::StoppedAtResolution {
            built,
            next_epsilon,
            floor,
        } => format!(
            "stopped after {built} levels: next epsilon {} is not above twice the density ({})",
            format_real(*next_epsilon),
            format_real(*floor)
        ),
    }
}

struct Stopwatch {
    start: Instant,
    timings: Vec<(&'static str, f64)>,
}

impl Stopwatch {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            timings: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.timings
            .push((stage, now.duration_since(self.start).as_secs_f64()));
        self.start = now;
    }
}

/// Generates or loads the ground and applies any density override.
pub fn load_ground(config: &RunConfig) -> Result<Arc<MetricGround>> {
    let ground = match &config.source {
        GroundSource::Generated(_) => {
            let spec = config.space_spec().expect("generated source");
            SpaceRegistry::with_builtins().generate(&spec)?
        }
        GroundSource::File { path, format } => load_ground_file(path, *format)?,
    };
    let ground = match config.density {
        Some(d) => ground.with_density(d)?,
        None => ground,
    };
    Ok(Arc::new(ground))
}

/// Reads the configured sequence file, or builds the sequence. The default
/// first radius is half the ground diameter, or 1 for a one-point ground.
pub fn load_sequence(config: &RunConfig, ground: Arc<MetricGround>) -> Result<AdjustedSequence> {
    if let Some(path) = &config.sequence_file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return read_sequence(&text, ground);
    }
    let diameter = if ground.diameter() > 0.0 {
        ground.diameter()
    } else {
        2.0
    };
    let params = config.sequence_params(diameter);
    Ok(build_adjusted_sequence(ground, &params)?)
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn checks_text(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    for check in &outcome.checks {
        let _ = writeln!(out, "{}", check.line());
        for detail in &check.details {
            let _ = writeln!(out, "    {detail}");
        }
    }
    out
}

fn report_text(config: &RunConfig, outcome: &RunOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed = {}", outcome.seed);
    let _ = writeln!(out, "\n[summary]");
    out.push_str(&outcome.summary_table());
    let _ = writeln!(out, "\n[checks]");
    for line in outcome.verdict_lines() {
        let _ = writeln!(out, "{line}");
    }
    if let Some(h) = &outcome.homology {
        let _ = writeln!(out, "\n[homology]");
        out.push_str(&h.to_text());
    }
    let _ = writeln!(out, "\n[timings]");
    for (stage, secs) in &outcome.timings {
        let _ = writeln!(out, "{stage}_seconds = {secs:.3}");
    }
    let _ = writeln!(out, "\n[config]");
    out.push_str(&config.to_text());
    out
}

fn ground_export(ground: &MetricGround, dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    if ground.coords().is_some() {
        let path = dir.join("ground.csv");
        write_coords_csv(ground, &path)?;
        written.push(path);
    } else {
        let path = dir.join("ground_distances.csv");
        write_distmatrix_csv(ground, &path)?;
        written.push(path);
    }
    Ok(())
}

fn nearest_maps(seq: &AdjustedSequence, tau: f64) -> Result<Vec<MultiMap>> {
    Ok(seq
        .levels()
        .par_iter()
        .map(|l| nearest_point_map(seq.ground(), &l.net, tau))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Builds everything, runs the checks and the homology report and writes
/// the bundle when an output directory is configured. Any stage error
/// aborts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut clock = Stopwatch::new();
    let ground = load_ground(config)?;
    clock.lap("ground");
    let sequence = load_sequence(config, ground)?;
    clock.lap("sequence");
    let tower = Tower::build(&sequence, &config.tower_options())?;
    clock.lap("tower");
    let names = config.check_names(&RUN_CHECKS);
    let ctx = CheckContext {
        sequence: &sequence,
        nearest: tower.nearest_maps(),
        tau: tower.tau(),
        tower: Ok(&tower),
        extra_bounds: &config.extra_bounds,
        max_degree: config.max_degree,
        simplex_budget: config.simplex_budget,
    };
    let checks = CheckRegistry::with_builtins().run(&names, &ctx)?;
    clock.lap("checks");
    let homology = shape_report_for_tower(&tower, &config.shape_options())?;
    clock.lap("homology");
    let mut outcome = RunOutcome {
        seed: config.seed,
        hyperlevel_sizes: Some(tower.hyperlevels().iter().map(|h| h.len()).collect()),
        sequence,
        checks,
        homology: Some(homology),
        timings: Vec::new(),
        written: Vec::new(),
    };
    if let Some(dir) = &config.output {
        write_bundle(config, &tower, &mut outcome, dir, &mut clock)?;
    }
    outcome.timings = clock.timings;
    if let Some(dir) = &config.output {
        let mut written = std::mem::take(&mut outcome.written);
        write_file(
            dir,
            "report.txt",
            &report_text(config, &outcome),
            &mut written,
        )?;
        outcome.written = written;
    }
    Ok(outcome)
}

fn write_bundle(
    config: &RunConfig,
    tower: &Tower,
    outcome: &mut RunOutcome,
    dir: &Path,
    clock: &mut Stopwatch,
) -> Result<()> {
    prepare_dir(dir)?;
    let mut written = Vec::new();
    let seq = &outcome.sequence;
    write_file(dir, "config.txt", &config.to_text(), &mut written)?;
    ground_export(seq.ground(), dir, &mut written)?;
    write_file(dir, "sequence.txt", &sequence_record(seq), &mut written)?;
    write_file(dir, "sequence.csv", &sequence_csv(seq), &mut written)?;
    if config.export_posets {
        for hl in tower.hyperlevels() {
            let n = hl.index();
            write_file(dir, &format!("poset_{n}.dot"), &poset_dot(hl), &mut written)?;
            write_file(dir, &format!("poset_{n}.csv"), &poset_csv(hl), &mut written)?;
        }
    }
    if config.export_complexes {
        for level in seq.levels() {
            for kind in [ComplexKind::Order, ComplexKind::Rips] {
                let (complex, coords) = build_complex(config, tower, level.index, kind)?;
                let stem = format!("{}_complex_{}", kind.name(), level.index);
                write_file(
                    dir,
                    &format!("{stem}.off"),
                    &complex_off(&complex, coords.as_deref()),
                    &mut written,
                )?;
                write_file(
                    dir,
                    &format!("{stem}.csv"),
                    &complex_csv(&complex),
                    &mut written,
                )?;
            }
        }
    }
    if let Some(h) = &outcome.homology {
        write_file(dir, "homology.csv", &h.to_csv(), &mut written)?;
        write_file(dir, "homology.txt", &h.to_text(), &mut written)?;
    }
    write_file(dir, "checks.txt", &checks_text(outcome), &mut written)?;
    clock.lap("exports");
    outcome.written = written;
    Ok(())
}

/// Runs only the checks. A sequence that cannot carry a tower still gets its
/// verdicts: checks needing the tower then fail with the reason.
pub fn verify(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut clock = Stopwatch::new();
    let ground = load_ground(config)?;
    clock.lap("ground");
    let sequence = load_sequence(config, ground)?;
    clock.lap("sequence");
    let tower = Tower::build(&sequence, &config.tower_options());
    clock.lap("tower");
    let tau = tie_tolerance(sequence.ground(), config.tie_tolerance);
    let nearest = match &tower {
        Ok(t) => t.nearest_maps().to_vec(),
        Err(_) => nearest_maps(&sequence, tau)?,
    };
    let ctx = CheckContext {
        sequence: &sequence,
        nearest: &nearest,
        tau,
        tower: tower
            .as_ref()
            .map_err(|e| format!("{} stage: {e}", e.stage())),
        extra_bounds: &config.extra_bounds,
        max_degree: config.max_degree,
        simplex_budget: config.simplex_budget,
    };
    let checks = CheckRegistry::with_builtins().run(&config.check_names(&VERIFY_CHECKS), &ctx)?;
    clock.lap("checks");
    let mut outcome = RunOutcome {
        seed: config.seed,
        hyperlevel_sizes: tower
            .as_ref()
            .ok()
            .map(|t| t.hyperlevels().iter().map(|h| h.len()).collect()),
        sequence,
        checks,
        homology: None,
        timings: clock.timings,
        written: Vec::new(),
    };
    if let Some(dir) = &config.output {
        prepare_dir(dir)?;
        let mut written = Vec::new();
        write_file(dir, "checks.txt", &checks_text(&outcome), &mut written)?;
        write_file(
            dir,
            "report.txt",
            &report_text(config, &outcome),
            &mut written,
        )?;
        outcome.written = written;
    }
    Ok(outcome)
}

/// Which complex of a level to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    /// Chains of the hyperlevel poset.
    Order,
    /// Small-diameter subsets of the net.
    Rips,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Order => "order",
            ComplexKind::Rips => "rips",
        }
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "order" => Ok(ComplexKind::Order),
            "rips" => Ok(ComplexKind::Rips),
            other => Err(format!(
                "unknown complex kind `{other}` (expected order or rips)"
            )),
        }
    }
}

/// Complex of level `n` with vertex coordinates when the ground has them
/// (element barycentres for order complexes).
fn build_complex(
    config: &RunConfig,
    tower: &Tower,
    n: usize,
    kind: ComplexKind,
) -> Result<(SimplicialComplex, Option<Vec<Vec<f64>>>)> {
    let dim = config.max_degree + 1;
    let seq = tower.sequence();
    let coords = seq.ground().coords();
    Ok(match kind {
        ComplexKind::Order => {
            let hl = tower.hyperlevel(n);
            let complex = order_complex(hl, dim, config.simplex_budget)?;
            (
                complex,
                coords.map(|c| element_barycentres(hl.elements(), c)),
            )
        }
        ComplexKind::Rips => {
            let level = seq.level(n).expect("level in range");
            let complex = rips_complex(seq.ground(), level, dim, config.simplex_budget)?;
            let net_coords = coords.map(|c| level.net.iter().map(|&i| c[i].clone()).collect());
            (complex, net_coords)
        }
    })
}

fn build_tower(config: &RunConfig) -> Result<Tower> {
    config.validate()?;
    let ground = load_ground(config)?;
    let sequence = load_sequence(config, ground)?;
    Tower::build(&sequence, &config.tower_options())
}

fn selected_levels(tower: &Tower, level: Option<usize>) -> Result<Vec<usize>> {
    match level {
        None => Ok((1..=tower.depth()).collect()),
        Some(n) if (1..=tower.depth()).contains(&n) => Ok(vec![n]),
        Some(n) => Err(Error::Config(format!(
            "level {n} out of range: the sequence has {} levels",
            tower.depth()
        ))),
    }
}

/// Writes `poset_<n>.dot` and `poset_<n>.csv` for one level or all.
pub fn export_posets(config: &RunConfig, level: Option<usize>, dir: &Path) -> Result<Vec<PathBuf>> {
    let tower = build_tower(config)?;
    prepare_dir(dir)?;
    let mut written = Vec::new();
    for n in selected_levels(&tower, level)? {
        let hl = tower.hyperlevel(n);
        write_file(dir, &format!("poset_{n}.dot"), &poset_dot(hl), &mut written)?;
        write_file(dir, &format!("poset_{n}.csv"), &poset_csv(hl), &mut written)?;
    }
    Ok(written)
}

/// Writes `<kind>_complex_<n>.off` and `.csv` for one level or all.
pub fn export_complexes(
    config: &RunConfig,
    level: Option<usize>,
    kind: ComplexKind,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let tower = build_tower(config)?;
    prepare_dir(dir)?;
    let mut written = Vec::new();
    for n in selected_levels(&tower, level)? {
        let (complex, coords) = build_complex(config, &tower, n, kind)?;
        let stem = format!("{}_complex_{n}", kind.name());
        write_file(
            dir,
            &format!("{stem}.off"),
            &complex_off(&complex, coords.as_deref()),
            &mut written,
        )?;
        write_file(
            dir,
            &format!("{stem}.csv"),
            &complex_csv(&complex),
            &mut written,
        )?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(samples: &str) -> RunConfig {
        let mut c = RunConfig::default();
        c.set("space", "circle").unwrap();
        c.set("samples", samples).unwrap();
        c
    }

    #[test]
    fn circle_run_passes_and_sees_one_loop() {
        let outcome = run(&circle("128")).unwrap();
        assert!(outcome.passed(), "{}", outcome.verdict_lines().join("\n"));
        assert_eq!(outcome.homology.as_ref().unwrap().stabilized, vec![1, 1]);
        assert!(outcome.summary_table().contains("stabilized ranks"));
    }

    #[test]
    fn singleton_ground_uses_unit_radius() {
        let mut c = RunConfig::default();
        c.set("space", "custom").unwrap();
        c.source = GroundSource::Generated({
            let mut spec = crate::metric::SpaceSpec::new("custom");
            spec.params.points = vec![vec![0.0, 0.0]];
            spec
        });
        let outcome = run(&c).unwrap();
        assert!(outcome.passed());
        assert_eq!(outcome.sequence.levels()[0].epsilon, 1.0);
        let h = outcome.homology.unwrap();
        assert!(h.levels.iter().all(|l| l.betti == vec![1, 0]));
        assert!(h.pairs.iter().all(|p| p.ranks == vec![1, 0]));
    }

    #[test]
    fn invalid_config_fails_before_work() {
        let mut c = circle("64");
        c.set("safety", "1.2").unwrap();
        let err = run(&c).unwrap_err();
        assert_eq!(err.stage(), "config");
    }

    #[test]
    fn unknown_check_is_an_error() {
        let mut c = circle("64");
        c.set("checks", "sequence,bogus").unwrap();
        assert!(matches!(verify(&c), Err(Error::Config(m)) if m.contains("bogus")));
    }
}
