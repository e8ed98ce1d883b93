//! Named generators for the test spaces, selected at runtime by name.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{warsaw, MetricError, MetricGround};

/// Parameters shared by all generators; each generator reads the ones it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceParams {
    /// Sample count; `None` selects the generator's default.
    pub samples: Option<usize>,
    pub radius: f64,
    pub length: f64,
    /// Cantor construction depth.
    pub depth: usize,
    pub separation: f64,
    /// Random angular perturbation of circle samples, as a fraction of the
    /// uniform spacing, in `[0, 0.5)`.
    pub jitter: f64,
    /// Explicit coordinates for the `custom` kind.
    pub points: Vec<Vec<f64>>,
}

impl Default for SpaceParams {
    fn default() -> Self {
        Self {
            samples: None,
            radius: 1.0,
            length: 1.0,
            depth: 4,
            separation: 1.0,
            jitter: 0.0,
            points: Vec::new(),
        }
    }
}

/// A named space together with its parameters and sampling seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    pub kind: String,
    pub params: SpaceParams,
    pub seed: u64,
}

impl SpaceSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            params: SpaceParams::default(),
            seed: 0,
        }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.params.samples = Some(n);
        self
    }

    pub fn depth(mut self, depth: usize) -> Self {
        self.params.depth = depth;
        self
    }

    pub fn separation(mut self, separation: f64) -> Self {
        self.params.separation = separation;
        self
    }

    pub fn radius(mut self, radius: f64) -> Self {
        self.params.radius = radius;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub trait SpaceGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Alternative names accepted by the registry.
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn summary(&self) -> &'static str;

    fn generate(&self, params: &SpaceParams, seed: u64) -> Result<MetricGround, MetricError>;
}

/// Registry of space generators keyed by name.
pub struct SpaceRegistry {
    generators: BTreeMap<&'static str, Box<dyn SpaceGenerator>>,
    aliases: BTreeMap<&'static str, &'static str>,
}

impl SpaceRegistry {
    pub fn empty() -> Self {
        Self {
            generators: BTreeMap::new(),
            aliases: BTreeMap::new(),
        }
    }

    /// Registry holding every built-in generator.
    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(Circle));
        registry.register(Box::new(WarsawCircle));
        registry.register(Box::new(Interval));
        registry.register(Box::new(CantorSet));
        registry.register(Box::new(TwoPoints));
        registry.register(Box::new(CustomPoints));
        registry
    }

    pub fn register(&mut self, generator: Box<dyn SpaceGenerator>) {
        let name = generator.name();
        for alias in generator.aliases() {
            self.aliases.insert(alias, name);
        }
        self.generators.insert(name, generator);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SpaceGenerator> {
        let canonical = self.aliases.get(name).copied().unwrap_or(name);
        self.generators.get(canonical).map(|g| g.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn generate(&self, spec: &SpaceSpec) -> Result<MetricGround, MetricError> {
        let generator = self
            .get(&spec.kind)
            .ok_or_else(|| MetricError::UnknownKind(spec.kind.clone()))?;
        generator.generate(&spec.params, spec.seed)
    }
}

impl Default for SpaceRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn sample_count(params: &SpaceParams, default: usize) -> Result<usize, MetricError> {
    match params.samples {
        Some(0) => Err(MetricError::NonPositiveSamples(0)),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, MetricError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(MetricError::InvalidParameter {
            name,
            reason: format!("must be positive, got {value}"),
        })
    }
}

/// Circle of the given radius in the plane with the chordal metric.
pub struct Circle;

impl SpaceGenerator for Circle {
    fn name(&self) -> &'static str {
        "circle"
    }

    fn summary(&self) -> &'static str {
        "circle in the plane, equally spaced samples (optional seeded jitter), chordal metric"
    }

    fn generate(&self, params: &SpaceParams, seed: u64) -> Result<MetricGround, MetricError> {
        let n = sample_count(params, 256)?;
        let radius = positive("radius", params.radius)?;
        if !(0.0..0.5).contains(&params.jitter) {
            return Err(MetricError::InvalidParameter {
                name: "jitter",
                reason: format!("must lie in [0, 0.5), got {}", params.jitter),
            });
        }
        let step = 2.0 * PI / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles: Vec<f64> = (0..n)
            .map(|i| {
                let wobble = if params.jitter > 0.0 {
                    params.jitter * step * rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                };
                i as f64 * step + wobble
            })
            .collect();
        let max_gap = (0..n)
            .map(|i| {
                if i + 1 < n {
                    angles[i + 1] - angles[i]
                } else {
                    angles[0] + 2.0 * PI - angles[i]
                }
            })
            .fold(0.0, f64::max);
        // farthest circle point from the samples is the midpoint of the widest gap
        let density = 2.0 * radius * (max_gap / 4.0).sin();
        let coords = angles
            .iter()
            .map(|t| vec![radius * t.cos(), radius * t.sin()])
            .collect();
        MetricGround::from_coords(coords, density)
    }
}

/// Closed interval `[0, length]` with equally spaced samples.
pub struct Interval;

impl SpaceGenerator for Interval {
    fn name(&self) -> &'static str {
        "interval"
    }

    fn summary(&self) -> &'static str {
        "interval [0, length] with equally spaced samples including both ends"
    }

    fn generate(&self, params: &SpaceParams, _seed: u64) -> Result<MetricGround, MetricError> {
        let n = sample_count(params, 200)?;
        let length = positive("length", params.length)?;
        if n == 1 {
            return MetricGround::from_coords(vec![vec![0.5 * length]], 0.5 * length);
        }
        let step = length / (n - 1) as f64;
        let coords = (0..n).map(|i| vec![i as f64 * step]).collect();
        MetricGround::from_coords(coords, 0.5 * step)
    }
}

/// Two points on a line at the given separation.
pub struct TwoPoints;

impl SpaceGenerator for TwoPoints {
    fn name(&self) -> &'static str {
        "two_points"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["two-points"]
    }

    fn summary(&self) -> &'static str {
        "two points at distance `separation`"
    }

    fn generate(&self, params: &SpaceParams, _seed: u64) -> Result<MetricGround, MetricError> {
        let separation = positive("separation", params.separation)?;
        MetricGround::from_coords(vec![vec![0.0], vec![separation]], 0.0)
    }
}

/// Middle-thirds Cantor set: both endpoints of every interval kept after
/// `depth` removal steps, metric inherited from the real line.
pub struct CantorSet;

impl CantorSet {
    /// Endpoints in units of `3^-depth`, sorted.
    pub fn endpoints(depth: usize) -> Vec<u64> {
        let mut intervals = vec![(0u64, 3u64.pow(depth as u32))];
        for _ in 0..depth {
            intervals = intervals
                .into_iter()
                .flat_map(|(a, b)| {
                    let third = (b - a) / 3;
                    [(a, a + third), (b - third, b)]
                })
                .collect();
        }
        intervals.into_iter().flat_map(|(a, b)| [a, b]).collect()
    }
}

impl SpaceGenerator for CantorSet {
    fn name(&self) -> &'static str {
        "cantor"
    }

    fn summary(&self) -> &'static str {
        "middle-thirds Cantor set: interval endpoints after `depth` steps"
    }

    fn generate(&self, params: &SpaceParams, _seed: u64) -> Result<MetricGround, MetricError> {
        if params.depth > 30 {
            return Err(MetricError::InvalidParameter {
                name: "depth",
                reason: format!("Cantor depth {} is too large", params.depth),
            });
        }
        let length = positive("length", params.length)?;
        let unit = length / 3f64.powi(params.depth as i32);
        let coords = Self::endpoints(params.depth)
            .into_iter()
            .map(|m| vec![m as f64 * unit])
            .collect();
        MetricGround::from_coords(coords, 0.5 * unit)
    }
}

/// Warsaw circle sampled uniformly in arc length.
pub struct WarsawCircle;

impl SpaceGenerator for WarsawCircle {
    fn name(&self) -> &'static str {
        "warsaw_circle"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["warsaw", "warsaw-circle"]
    }

    fn summary(&self) -> &'static str {
        "closure of the sin(1/x) graph on (0, 2/pi] closed by a rectangular arc"
    }

    fn generate(&self, params: &SpaceParams, _seed: u64) -> Result<MetricGround, MetricError> {
        let n = sample_count(params, 2000)?;
        if n < 2 {
            return Err(MetricError::InvalidParameter {
                name: "samples",
                reason: "the Warsaw circle needs at least 2 samples".to_string(),
            });
        }
        let sample = warsaw::sample(n);
        MetricGround::from_coords(sample.points, sample.density)
    }
}

/// User-supplied coordinates, treated as the space itself (density 0).
pub struct CustomPoints;

impl SpaceGenerator for CustomPoints {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn summary(&self) -> &'static str {
        "explicit coordinates taken as the whole space"
    }

    fn generate(&self, params: &SpaceParams, _seed: u64) -> Result<MetricGround, MetricError> {
        if params.points.is_empty() {
            return Err(MetricError::NonPositiveSamples(0));
        }
        MetricGround::from_coords(params.points.clone(), 0.0)
    }
}
