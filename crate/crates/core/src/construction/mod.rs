//! Adjusted approximative sequences.
//!
//! Level `n` carries a radius `epsilon_n`, a finite net `A_n` of ground
//! points and its realized covering radius `gamma_n = max_x d(x, A_n)`. The
//! sequence is adjusted when `gamma_n < epsilon_n` and
//! `epsilon_{n+1} < (epsilon_n - gamma_n) / 2` for every level.

mod io;
mod net;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::metric::MetricGround;

pub use io::{read_sequence, sequence_csv, sequence_record, write_sequence};
pub use net::{FarthestPoint, FirstFit, NetRegistry, NetStrategy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("net is empty")]
    EmptyNet,
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("epsilon1 = {epsilon1} must exceed twice the ground density ({floor})")]
    EpsilonTooSmall { epsilon1: f64, floor: f64 },
    #[error("safety must lie in (0, 1), got {0}")]
    SafetyOutOfRange(f64),
    #[error("net ratio `{name}` must lie in (0, 1], got {value}")]
    NetRatioOutOfRange { name: &'static str, value: f64 },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("unknown net strategy `{0}`")]
    UnknownStrategy(String),
    #[error("net index {index} out of range for a ground of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("malformed sequence file at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One level of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    /// 1-based level index.
    pub index: usize,
    pub epsilon: f64,
    /// Sorted ground indices of the net.
    pub net: Vec<usize>,
    pub gamma: f64,
}

/// Knobs of [`build_adjusted_sequence`].
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceParams {
    pub epsilon1: f64,
    pub depth: usize,
    /// `epsilon_{n+1} = safety * (epsilon_n - gamma_n) / 2`.
    pub safety: f64,
    /// Levels followed by another level use nets of covering radius below
    /// `net_ratio * epsilon_n`; a small ratio keeps `gamma_n` well under
    /// `epsilon_n` so the radii do not collapse.
    pub net_ratio: f64,
    /// Ratio used for the last requested level, which has no successor.
    pub terminal_net_ratio: f64,
    pub strategy: String,
}

impl SequenceParams {
    pub const DEFAULT_SAFETY: f64 = 0.9;
    pub const DEFAULT_NET_RATIO: f64 = 0.2;
    pub const DEFAULT_TERMINAL_NET_RATIO: f64 = 0.5;

    pub fn new(epsilon1: f64, depth: usize, safety: f64) -> Self {
        Self {
            epsilon1,
            depth,
            safety,
            net_ratio: Self::DEFAULT_NET_RATIO,
            terminal_net_ratio: Self::DEFAULT_TERMINAL_NET_RATIO,
            strategy: FarthestPoint.name().to_string(),
        }
    }

    /// Uses the same ratio on every level.
    pub fn with_net_ratio(mut self, ratio: f64) -> Self {
        self.net_ratio = ratio;
        self.terminal_net_ratio = ratio;
        self
    }

    pub fn with_strategy(mut self, name: impl Into<String>) -> Self {
        self.strategy = name.into();
        self
    }

    pub fn validate(&self, density: f64) -> Result<(), ConstructionError> {
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(ConstructionError::SafetyOutOfRange(self.safety));
        }
        for (name, value) in [
            ("net_ratio", self.net_ratio),
            ("terminal_net_ratio", self.terminal_net_ratio),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConstructionError::NetRatioOutOfRange { name, value });
            }
        }
        if self.depth == 0 {
            return Err(ConstructionError::ZeroDepth);
        }
        if !(self.epsilon1 > 0.0) || !self.epsilon1.is_finite() {
            return Err(ConstructionError::NonPositiveEpsilon(self.epsilon1));
        }
        let floor = 2.0 * density;
        if self.epsilon1 <= floor {
            return Err(ConstructionError::EpsilonTooSmall {
                epsilon1: self.epsilon1,
                floor,
            });
        }
        Ok(())
    }
}

/// Why construction ended.
#[derive(Clone, Debug, PartialEq)]
pub enum BuildStatus {
    /// All requested levels were built.
    Complete,
    /// The next radius fell to `floor = 2 * density` or below, where the
    /// ground sample no longer represents the space.
    StoppedAtResolution {
        built: usize,
        next_epsilon: f64,
        floor: f64,
    },
}

impl fmt::Display for BuildStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildStatus::Complete => write!(f, "complete"),
            BuildStatus::StoppedAtResolution {
                built,
                next_epsilon,
                floor,
            } => write!(
                f,
                "stopped_at_resolution built={built} next_epsilon={} floor={}",
                crate::format_real(*next_epsilon),
                crate::format_real(*floor)
            ),
        }
    }
}

/// A violated adjustment condition, found by [`AdjustedSequence::violations`].
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceViolation {
    /// Recorded gamma differs from the recomputed covering radius.
    GammaMismatch {
        n: usize,
        recorded: f64,
        actual: f64,
    },
    /// `gamma_n < epsilon_n` fails.
    GammaNotBelowEpsilon {
        n: usize,
        gamma: f64,
        epsilon: f64,
    },
    /// `epsilon_{n+1} < (epsilon_n - gamma_n) / 2` fails.
    NotAdjusted {
        n: usize,
        next_epsilon: f64,
        bound: f64,
    },
    /// Level indices are not `1, 2, ...`.
    BadIndex {
        position: usize,
        index: usize,
    },
    EmptyNet {
        n: usize,
    },
}

impl fmt::Display for SequenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::format_real as r;
        match self {
            SequenceViolation::GammaMismatch {
                n,
                recorded,
                actual,
            } => write!(
                f,
                "gamma_{n} recorded as {} but the net covers at {}",
                r(*recorded),
                r(*actual)
            ),
            SequenceViolation::GammaNotBelowEpsilon { n, gamma, epsilon } => write!(
                f,
                "gamma_{n} < epsilon_{n} fails: {} >= {}",
                r(*gamma),
                r(*epsilon)
            ),
            SequenceViolation::NotAdjusted {
                n,
                next_epsilon,
                bound,
            } => write!(
                f,
                "epsilon_{} < (epsilon_{n} - gamma_{n})/2 fails: {} >= {}",
                n + 1,
                r(*next_epsilon),
                r(*bound)
            ),
            SequenceViolation::BadIndex { position, index } => {
                write!(f, "level at position {position} has index {index}")
            }
            SequenceViolation::EmptyNet { n } => write!(f, "net of level {n} is empty"),
        }
    }
}

/// An adjusted approximative sequence over a shared ground.
#[derive(Clone, Debug)]
pub struct AdjustedSequence {
    ground: Arc<MetricGround>,
    levels: Vec<Level>,
    safety: f64,
    status: BuildStatus,
}

impl AdjustedSequence {
    /// Assembles a sequence without checking it; use
    /// [`violations`](Self::violations) to validate. Net indices are checked
    /// against the ground.
    pub fn from_parts(
        ground: Arc<MetricGround>,
        levels: Vec<Level>,
        safety: f64,
        status: BuildStatus,
    ) -> Result<Self, ConstructionError> {
        for level in &levels {
            if let Some(&index) = level.net.iter().find(|&&a| a >= ground.len()) {
                return Err(ConstructionError::IndexOutOfRange {
                    index,
                    len: ground.len(),
                });
            }
        }
        Ok(Self {
            ground,
            levels,
            safety,
            status,
        })
    }

    pub fn ground(&self) -> &MetricGround {
        &self.ground
    }

    pub fn shared_ground(&self) -> Arc<MetricGround> {
        Arc::clone(&self.ground)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level with 1-based index `n`.
    pub fn level(&self, n: usize) -> Option<&Level> {
        n.checked_sub(1).and_then(|k| self.levels.get(k))
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn safety(&self) -> f64 {
        self.safety
    }

    pub fn status(&self) -> &BuildStatus {
        &self.status
    }

    /// `epsilon_n - gamma_n` per level.
    pub fn gamma_slack(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.epsilon - l.gamma).collect()
    }

    /// `(epsilon_n - gamma_n)/2 - epsilon_{n+1}` per consecutive pair.
    pub fn adjustment_slack(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| 0.5 * (w[0].epsilon - w[0].gamma) - w[1].epsilon)
            .collect()
    }

    /// Every violated adjustment condition; empty for a valid sequence.
    /// Strict inequalities are compared exactly.
    pub fn violations(&self) -> Vec<SequenceViolation> {
        let mut out = Vec::new();
        for (position, level) in self.levels.iter().enumerate() {
            let n = level.index;
            if n != position + 1 {
                out.push(SequenceViolation::BadIndex { position, index: n });
            }
            if level.net.is_empty() {
                out.push(SequenceViolation::EmptyNet { n });
                continue;
            }
            let actual = gamma_unchecked(&self.ground, &level.net);
            if actual != level.gamma {
                out.push(SequenceViolation::GammaMismatch {
                    n,
                    recorded: level.gamma,
                    actual,
                });
            }
            let g = actual.max(level.gamma);
            if !(g < level.epsilon) {
                out.push(SequenceViolation::GammaNotBelowEpsilon {
                    n,
                    gamma: g,
                    epsilon: level.epsilon,
                });
            }
        }
        for w in self.levels.windows(2) {
            let bound = 0.5 * (w[0].epsilon - w[0].gamma);
            if !(w[1].epsilon < bound) {
                out.push(SequenceViolation::NotAdjusted {
                    n: w[0].index,
                    next_epsilon: w[1].epsilon,
                    bound,
                });
            }
        }
        out
    }
}

/// Greedy farthest-point net: every ground point lies strictly within
/// `epsilon` of the result.
pub fn build_net(ground: &MetricGround, epsilon: f64) -> Vec<usize> {
    FarthestPoint.select(ground, epsilon)
}

/// Realized covering radius `max_x d(x, net)`.
pub fn gamma(ground: &MetricGround, net: &[usize]) -> Result<f64, ConstructionError> {
    if net.is_empty() {
        return Err(ConstructionError::EmptyNet);
    }
    Ok(gamma_unchecked(ground, net))
}

fn gamma_unchecked(ground: &MetricGround, net: &[usize]) -> f64 {
    (0..ground.len())
        .into_par_iter()
        .map(|x| ground.distance_to_set(x, net))
        .reduce(|| 0.0, f64::max)
}

/// Runs the construction: `A_n` is a net of radius `ratio * epsilon_n`,
/// `gamma_n` its covering radius and
/// `epsilon_{n+1} = safety * (epsilon_n - gamma_n) / 2`.
///
/// Stops early, with [`BuildStatus::StoppedAtResolution`], once the next
/// radius would be at most twice the ground density.
pub fn build_adjusted_sequence(
    ground: Arc<MetricGround>,
    params: &SequenceParams,
) -> Result<AdjustedSequence, ConstructionError> {
    build_adjusted_sequence_with(ground, params, &NetRegistry::with_builtins())
}

pub fn build_adjusted_sequence_with(
    ground: Arc<MetricGround>,
    params: &SequenceParams,
    registry: &NetRegistry,
) -> Result<AdjustedSequence, ConstructionError> {
    params.validate(ground.density())?;
    let strategy = registry
        .get(&params.strategy)
        .ok_or_else(|| ConstructionError::UnknownStrategy(params.strategy.clone()))?;
    let floor = 2.0 * ground.density();
    let mut levels = Vec::with_capacity(params.depth);
    let mut epsilon = params.epsilon1;
    let mut status = BuildStatus::Complete;
    for n in 1..=params.depth {
        let ratio = if n == params.depth {
            params.terminal_net_ratio
        } else {
            params.net_ratio
        };
        let net = strategy.select(&ground, ratio * epsilon);
        let gamma = gamma(&ground, &net)?;
        levels.push(Level {
            index: n,
            epsilon,
            net,
            gamma,
        });
        if n == params.depth {
            break;
        }
        let next = params.safety * (epsilon - gamma) / 2.0;
        if next <= floor {
            status = BuildStatus::StoppedAtResolution {
                built: n,
                next_epsilon: next,
                floor,
            };
            break;
        }
        epsilon = next;
    }
    Ok(AdjustedSequence {
        ground,
        levels,
        safety: params.safety,
        status,
    })
}
