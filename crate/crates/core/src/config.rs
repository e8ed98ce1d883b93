//! Run configuration: a flat `key = value` file plus overrides.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. The same keys are accepted by [`RunConfig::set`], which the
//! command line uses for flag overrides applied after the file.

use std::path::{Path, PathBuf};

use crate::construction::SequenceParams;
use crate::hyperspace::HyperOptions;
use crate::invariants::ShapeOptions;
use crate::metric::{GroundFormat, SpaceSpec};
use crate::tower::TowerOptions;
use crate::{Error, Result};

/// Checks run by `run` when none are configured.
pub const RUN_CHECKS: [&str; 6] = [
    "sequence",
    "lemma1",
    "continuity",
    "identity_morphism",
    "diagram",
    "barycentric",
];

/// Checks run by `verify` when none are configured.
pub const VERIFY_CHECKS: [&str; 5] = [
    "sequence",
    "lemma1",
    "continuity",
    "identity_morphism",
    "diagram",
];

#[derive(Clone, Debug, PartialEq)]
pub enum GroundSource {
    Generated(SpaceSpec),
    File { path: PathBuf, format: GroundFormat },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: GroundSource,
    /// Replaces the ground's density when set.
    pub density: Option<f64>,
    /// First radius; `None` selects half the ground diameter.
    pub epsilon1: Option<f64>,
    pub depth: usize,
    pub safety: f64,
    pub net_ratio: f64,
    pub terminal_net_ratio: f64,
    pub net_strategy: String,
    /// Tie tolerance relative to the ground diameter.
    pub tie_tolerance: f64,
    /// Highest homology degree (1 or 2).
    pub max_degree: usize,
    /// Largest subset size enumerated per hyperlevel; `None` selects
    /// `max_degree + 2`.
    pub cardinality_cap: Option<usize>,
    pub element_budget: usize,
    pub simplex_budget: usize,
    pub window: usize,
    pub output: Option<PathBuf>,
    /// Check names; `None` selects the command's default set.
    pub checks: Option<Vec<String>>,
    pub extra_bounds: Vec<f64>,
    /// Root seed; every random choice derives from it.
    pub seed: u64,
    /// Adjusted sequence read from a file instead of being built.
    pub sequence_file: Option<PathBuf>,
    pub export_posets: bool,
    pub export_complexes: bool,
    /// Worker threads for the command line; results do not depend on it.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let hyper = HyperOptions::default();
        Self {
            source: GroundSource::Generated(SpaceSpec::new("circle")),
            density: None,
            epsilon1: None,
            depth: 4,
            safety: SequenceParams::DEFAULT_SAFETY,
            net_ratio: SequenceParams::DEFAULT_NET_RATIO,
            terminal_net_ratio: SequenceParams::DEFAULT_TERMINAL_NET_RATIO,
            net_strategy: "farthest_point".to_string(),
            tie_tolerance: TowerOptions::DEFAULT_TIE_RELATIVE,
            max_degree: 1,
            cardinality_cap: None,
            element_budget: hyper.element_budget,
            simplex_budget: ShapeOptions::DEFAULT_SIMPLEX_BUDGET,
            window: ShapeOptions::DEFAULT_WINDOW,
            output: None,
            checks: None,
            extra_bounds: Vec::new(),
            seed: 0,
            sequence_file: None,
            export_posets: true,
            export_complexes: false,
            threads: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("invalid value `{value}` for `{key}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid value `{value}` for `{key}`: expected a boolean"
        ))),
    }
}

fn parse_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    pub const KEYS: [&'static str; 30] = [
        "space",
        "samples",
        "radius",
        "length",
        "cantor_depth",
        "separation",
        "jitter",
        "seed",
        "input",
        "input_format",
        "density",
        "epsilon1",
        "depth",
        "safety",
        "net_ratio",
        "terminal_net_ratio",
        "net_strategy",
        "tie_tolerance",
        "max_degree",
        "cardinality_cap",
        "element_budget",
        "simplex_budget",
        "window",
        "output",
        "checks",
        "extra_bounds",
        "sequence",
        "export_posets",
        "export_complexes",
        "threads",
    ];

    /// Parses a config file on top of the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Applies every `key = value` line of `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    k + 1
                ))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", k + 1)))?;
        }
        Ok(())
    }

    fn space_mut(&mut self) -> &mut SpaceSpec {
        if !matches!(self.source, GroundSource::Generated(_)) {
            self.source = GroundSource::Generated(SpaceSpec::new("circle"));
        }
        match &mut self.source {
            GroundSource::Generated(spec) => spec,
            GroundSource::File { .. } => unreachable!("replaced above"),
        }
    }

    /// Sets one key. Generator parameters switch the source back to a
    /// generated space; `input` switches it to a file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "space" => self.space_mut().kind = value.to_string(),
            "samples" => self.space_mut().params.samples = Some(parse(key, value)?),
            "radius" => self.space_mut().params.radius = parse(key, value)?,
            "length" => self.space_mut().params.length = parse(key, value)?,
            "cantor_depth" => self.space_mut().params.depth = parse(key, value)?,
            "separation" => self.space_mut().params.separation = parse(key, value)?,
            "jitter" => self.space_mut().params.jitter = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "input" => {
                let format = match &self.source {
                    GroundSource::File { format, .. } => *format,
                    GroundSource::Generated(_) => GroundFormat::CoordsCsv,
                };
                self.source = GroundSource::File {
                    path: PathBuf::from(value),
                    format,
                };
            }
            "input_format" => {
                let parsed: GroundFormat = parse(key, value)?;
                match &mut self.source {
                    GroundSource::File { format, .. } => *format = parsed,
                    GroundSource::Generated(_) => {
                        return Err(Error::Config("`input_format` requires `input`".into()))
                    }
                }
            }
            "density" => self.density = Some(parse(key, value)?),
            "epsilon1" => {
                self.epsilon1 = if value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "depth" => self.depth = parse(key, value)?,
            "safety" => self.safety = parse(key, value)?,
            "net_ratio" => self.net_ratio = parse(key, value)?,
            "terminal_net_ratio" => self.terminal_net_ratio = parse(key, value)?,
            "net_strategy" => self.net_strategy = value.to_string(),
            "tie_tolerance" => self.tie_tolerance = parse(key, value)?,
            "max_degree" => self.max_degree = parse(key, value)?,
            "cardinality_cap" => {
                self.cardinality_cap = if value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "element_budget" => self.element_budget = parse(key, value)?,
            "simplex_budget" => self.simplex_budget = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "checks" => {
                self.checks = if value == "default" {
                    None
                } else {
                    Some(parse_list(value).map(str::to_string).collect())
                }
            }
            "extra_bounds" => {
                self.extra_bounds = parse_list(value)
                    .map(|v| parse(key, v))
                    .collect::<Result<_>>()?
            }
            "sequence" => self.sequence_file = Some(PathBuf::from(value)),
            "export_posets" => self.export_posets = parse_bool(key, value)?,
            "export_complexes" => self.export_complexes = parse_bool(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown key `{key}` (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Range checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return fail(format!("safety must lie in (0, 1), got {}", self.safety));
        }
        if self.depth == 0 {
            return fail("depth must be at least 1".into());
        }
        for (name, value) in [
            ("net_ratio", self.net_ratio),
            ("terminal_net_ratio", self.terminal_net_ratio),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return fail(format!("{name} must lie in (0, 1], got {value}"));
            }
        }
        if let Some(e) = self.epsilon1 {
            if !(e > 0.0 && e.is_finite()) {
                return fail(format!("epsilon1 must be positive and finite, got {e}"));
            }
        }
        if let Some(d) = self.density {
            if !(d >= 0.0 && d.is_finite()) {
                return fail(format!("density must be non-negative and finite, got {d}"));
            }
        }
        if !(self.tie_tolerance >= 0.0 && self.tie_tolerance < 1.0) {
            return fail(format!(
                "tie_tolerance must lie in [0, 1), got {}",
                self.tie_tolerance
            ));
        }
        if !(1..=2).contains(&self.max_degree) {
            return fail(format!(
                "max_degree must be 1 or 2, got {}",
                self.max_degree
            ));
        }
        if let Some(cap) = self.cardinality_cap {
            if cap < self.max_degree + 2 {
                return fail(format!(
                    "cardinality_cap must be at least max_degree + 2 = {}, got {cap}",
                    self.max_degree + 2
                ));
            }
        }
        if self.window < 2 {
            return fail(format!("window must be at least 2, got {}", self.window));
        }
        if self.element_budget == 0 || self.simplex_budget == 0 {
            return fail("budgets must be positive".into());
        }
        if let Some(b) = self
            .extra_bounds
            .iter()
            .find(|b| !(**b >= 0.0 && b.is_finite()))
        {
            return fail(format!(
                "extra bounds must be non-negative and finite, got {b}"
            ));
        }
        if let GroundSource::Generated(spec) = &self.source {
            if spec.params.samples == Some(0) {
                return fail("samples must be positive".into());
            }
        }
        Ok(())
    }

    /// The generated space with the root seed applied; `None` for file
    /// input.
    pub fn space_spec(&self) -> Option<SpaceSpec> {
        match &self.source {
            GroundSource::Generated(spec) => Some(spec.clone().seed(self.seed)),
            GroundSource::File { .. } => None,
        }
    }

    pub fn tower_options(&self) -> TowerOptions {
        let mut hyper = HyperOptions::for_degree(self.max_degree);
        if let Some(cap) = self.cardinality_cap {
            hyper.cardinality_cap = cap;
        }
        hyper.element_budget = self.element_budget;
        TowerOptions {
            tie_relative: self.tie_tolerance,
            hyper,
        }
    }

    pub fn shape_options(&self) -> ShapeOptions {
        ShapeOptions {
            max_degree: self.max_degree,
            window: self.window,
            simplex_budget: self.simplex_budget,
        }
    }

    /// Sequence parameters once the ground diameter is known.
    pub fn sequence_params(&self, diameter: f64) -> SequenceParams {
        let mut params = SequenceParams::new(
            self.epsilon1.unwrap_or(diameter / 2.0),
            self.depth,
            self.safety,
        )
        .with_strategy(self.net_strategy.clone());
        params.net_ratio = self.net_ratio;
        params.terminal_net_ratio = self.terminal_net_ratio;
        params
    }

    /// Configured checks, or `default` when none are set.
    pub fn check_names(&self, default: &[&str]) -> Vec<String> {
        self.checks
            .clone()
            .unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
    }

    /// Flat `key = value` echo of the settings, parseable by
    /// [`RunConfig::apply_text`].
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        match &self.source {
            GroundSource::Generated(spec) => {
                let p = &spec.params;
                lines.push(format!("space = {}", spec.kind));
                if let Some(n) = p.samples {
                    lines.push(format!("samples = {n}"));
                }
                lines.push(format!("radius = {}", p.radius));
                lines.push(format!("length = {}", p.length));
                lines.push(format!("cantor_depth = {}", p.depth));
                lines.push(format!("separation = {}", p.separation));
                lines.push(format!("jitter = {}", p.jitter));
            }
            GroundSource::File { path, format } => {
                lines.push(format!("input = {}", path.display()));
                let name = match format {
                    GroundFormat::CoordsCsv => "coords_csv",
                    GroundFormat::DistMatrixCsv => "distmatrix_csv",
                };
                lines.push(format!("input_format = {name}"));
            }
        }
        lines.push(format!("seed = {}", self.seed));
        if let Some(d) = self.density {
            lines.push(format!("density = {d}"));
        }
        lines.push(format!(
            "epsilon1 = {}",
            self.epsilon1
                .map_or_else(|| "auto".to_string(), |e| e.to_string())
        ));
        lines.push(format!("depth = {}", self.depth));
        lines.push(format!("safety = {}", self.safety));
        lines.push(format!("net_ratio = {}", self.net_ratio));
        lines.push(format!("terminal_net_ratio = {}", self.terminal_net_ratio));
        lines.push(format!("net_strategy = {}", self.net_strategy));
        lines.push(format!("tie_tolerance = {}", self.tie_tolerance));
        lines.push(format!("max_degree = {}", self.max_degree));
        lines.push(format!(
            "cardinality_cap = {}",
            self.cardinality_cap
                .map_or_else(|| "auto".to_string(), |c| c.to_string())
        ));
        lines.push(format!("element_budget = {}", self.element_budget));
        lines.push(format!("simplex_budget = {}", self.simplex_budget));
        lines.push(format!("window = {}", self.window));
        if let Some(out) = &self.output {
            lines.push(format!("output = {}", out.display()));
        }
        lines.push(format!(
            "checks = {}",
            self.checks
                .as_ref()
                .map_or_else(|| "default".to_string(), |c| c.join(","))
        ));
        if !self.extra_bounds.is_empty() {
            let bounds: Vec<String> = self.extra_bounds.iter().map(f64::to_string).collect();
            lines.push(format!("extra_bounds = {}", bounds.join(",")));
        }
        if let Some(threads) = self.threads {
            lines.push(format!("threads = {threads}"));
        }
        if let Some(s) = &self.sequence_file {
            lines.push(format!("sequence = {}", s.display()));
        }
        lines.push(format!("export_posets = {}", self.export_posets));
        lines.push(format!("export_complexes = {}", self.export_complexes));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nspace = warsaw\nsamples = 2000\n\ndepth = 5\nsafety = 0.8\n")
            .unwrap();
        c.set("depth", "4").unwrap();
        assert_eq!(c.depth, 4);
        assert_eq!(c.safety, 0.8);
        match &c.source {
            GroundSource::Generated(spec) => {
                assert_eq!(spec.kind, "warsaw");
                assert_eq!(spec.params.samples, Some(2000));
            }
            other => panic!("unexpected source {other:?}"),
        }
        c.validate().unwrap();
    }

    #[test]
    fn echo_round_trips() {
        let mut c = RunConfig::default();
        c.apply_text("space = cantor\ncantor_depth = 3\nextra_bounds = 0.1, 0.2\nchecks = lemma1,diagram\nseed = 7\n")
            .unwrap();
        let mut again = RunConfig::default();
        again.apply_text(&c.to_text()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.space_spec().unwrap().seed, 7);
    }

    #[test]
    fn validation_rejects_out_of_range_values() {
        let mut c = RunConfig::default();
        c.set("safety", "1.2").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("safety")));
        for (key, value) in [
            ("depth", "0"),
            ("window", "1"),
            ("max_degree", "3"),
            ("cardinality_cap", "2"),
            ("tie_tolerance", "-1"),
            ("samples", "0"),
        ] {
            let mut c = RunConfig::default();
            c.set(key, value).unwrap();
            assert!(c.validate().is_err(), "{key} = {value}");
        }
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("depth 4").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("depth = four").is_err());
        assert!(c.apply_text("input_format = coords_csv").is_err());
        c.apply_text("input = points.csv\ninput_format = distmatrix_csv")
            .unwrap();
        assert_eq!(
            c.source,
            GroundSource::File {
                path: PathBuf::from("points.csv"),
                format: GroundFormat::DistMatrixCsv
            }
        );
    }
}
