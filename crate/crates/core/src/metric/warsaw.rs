//! Arc-length sampling of the Warsaw circle.
//!
//! The space is the closure of the graph of `sin(1/x)` on `(0, 2/pi]`, closed
//! by the rectangular arc `(2/pi, 1) -> (2/pi, -1.5) -> (0, -1.5) -> (0, 1)`,
//! whose last leg contains the limit segment `{0} x [-1, 1]`.
//!
//! The graph is parametrized by `u = 1/x`. Its arc length diverges as
//! `x -> 0`, so the sample walks a single open path (graph from `x_min` up to
//! `2/pi`, then the closing arc) at uniform arc-length spacing `s`. Graph
//! points left of `x_min` are within `x_min` of the limit segment, so every
//! point of the space lies within `x_min + s/2` of a sample. `x_min` is chosen
//! to minimize that bound for the given sample count.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

const GRID_STEP: f64 = 2e-3;
const BOTTOM: f64 = -1.5;

/// Point of the `sin(1/x)` graph at parameter `u = 1/x`.
pub fn warsaw_graph_point(u: f64) -> [f64; 2] {
    [1.0 / u, u.sin()]
}

/// Vertices of the closing arc, starting where the graph ends at `x = 2/pi`.
pub fn warsaw_closing_arc() -> [[f64; 2]; 4] {
    [
        [FRAC_2_PI, 1.0],
        [FRAC_2_PI, BOTTOM],
        [0.0, BOTTOM],
        [0.0, 1.0],
    ]
}

fn closing_arc_length() -> f64 {
    let arc = warsaw_closing_arc();
    arc.windows(2).map(|w| super::euclidean(&w[0], &w[1])).sum()
}

fn speed(u: f64) -> f64 {
    let u2 = u * u;
    (1.0 / (u2 * u2) + u.cos().powi(2)).sqrt()
}

/// Cumulative arc length of the graph on a uniform grid in `u` from `pi/2`.
struct ArcTable {
    cumulative: Vec<f64>,
}

impl ArcTable {
    fn new(u_max: f64) -> Self {
        let steps = ((u_max - FRAC_PI_2) / GRID_STEP).ceil() as usize + 1;
        let mut cumulative = Vec::with_capacity(steps + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..steps {
            let a = FRAC_PI_2 + k as f64 * GRID_STEP;
            let b = a + GRID_STEP;
            acc += simpson(a, b);
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    /// Arc length from `u = pi/2` to `u`.
    fn length_to(&self, u: f64) -> f64 {
        let pos = (u - FRAC_PI_2) / GRID_STEP;
        let k = (pos.max(0.0).floor() as usize).min(self.cumulative.len() - 2);
        let a = FRAC_PI_2 + k as f64 * GRID_STEP;
        self.cumulative[k] + simpson(a, u)
    }

    /// Parameter `u` at which the arc length from `pi/2` equals `s`.
    fn param_at(&self, s: f64) -> f64 {
        let k = match self
            .cumulative
            .binary_search_by(|probe| probe.partial_cmp(&s).unwrap())
        {
            Ok(k) => return FRAC_PI_2 + k as f64 * GRID_STEP,
            Err(k) => k.clamp(1, self.cumulative.len() - 1) - 1,
        };
        let lo = self.cumulative[k];
        let hi = self.cumulative[k + 1];
        let frac = if hi > lo { (s - lo) / (hi - lo) } else { 0.0 };
        let a = FRAC_PI_2 + k as f64 * GRID_STEP;
        let mut u = a + frac * GRID_STEP;
        // Newton steps on the in-cell integral
        for _ in 0..4 {
            u -= (lo + simpson(a, u) - s) / speed(u);
            u = u.clamp(a, a + GRID_STEP);
        }
        u
    }
}

/// Composite Simpson rule for the arc length on `[a, b]`, `b - a <= GRID_STEP`.
fn simpson(a: f64, b: f64) -> f64 {
    let h = (b - a) / 4.0;
    if h == 0.0 {
        return 0.0;
    }
    let f = |k: f64| speed(a + k * h);
    h / 3.0 * (f(0.0) + 4.0 * f(1.0) + 2.0 * f(2.0) + 4.0 * f(3.0) + f(4.0))
}

/// Sampled Warsaw circle: the points and the honest density bound.
pub(super) struct WarsawSample {
    pub points: Vec<Vec<f64>>,
    pub density: f64,
    /// Leftmost sampled abscissa of the graph.
    #[cfg_attr(not(test), allow(dead_code))]
    pub x_min: f64,
    /// Arc-length step between consecutive samples.
    #[cfg_attr(not(test), allow(dead_code))]
    pub spacing: f64,
}

pub(super) fn sample(n: usize) -> WarsawSample {
    debug_assert!(n >= 2);
    let target = (2.0 / (PI * n as f64)).sqrt();
    let x_hi = (4.0 * target).min(0.9 * FRAC_2_PI);
    let x_lo = (0.2 * target).min(0.5 * x_hi);
    let table = ArcTable::new(1.0 / x_lo);
    let closing = closing_arc_length();
    let bound = |x: f64| x + 0.5 * (table.length_to(1.0 / x) + closing) / (n - 1) as f64;

    // golden-section search for the x_min minimizing the density bound
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (x_lo, x_hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..100 {
        if bound(c) < bound(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    let x_min = 0.5 * (a + b);
    let u_max = 1.0 / x_min;
    let graph_len = table.length_to(u_max);
    let total = graph_len + closing;
    let spacing = total / (n - 1) as f64;

    let arc = warsaw_closing_arc();
    let points = (0..n)
        .map(|i| {
            let t = if i + 1 == n {
                total
            } else {
                i as f64 * spacing
            };
            if t <= graph_len {
                let u = table.param_at(graph_len - t).clamp(FRAC_PI_2, u_max);
                let [x, y] = warsaw_graph_point(u);
                vec![x, y]
            } else {
                let mut rest = t - graph_len;
                for w in arc.windows(2) {
                    let len = super::euclidean(&w[0], &w[1]);
                    if rest <= len {
                        let f = rest / len;
                        return vec![
                            w[0][0] + f * (w[1][0] - w[0][0]),
                            w[0][1] + f * (w[1][1] - w[0][1]),
                        ];
                    }
                    rest -= len;
                }
                arc[3].to_vec()
            }
        })
        .collect();
    // the tiny relative margin absorbs quadrature and interpolation error
    let density = (x_min + 0.5 * spacing) * (1.0 + 1e-6);
    WarsawSample {
        points,
        density,
        x_min,
        spacing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_table_matches_straight_line_limit() {
        // near u = pi/2 the graph is nearly flat in y, so short arcs are close to chords
        let table = ArcTable::new(3.0);
        let u0 = FRAC_PI_2;
        let u1 = FRAC_PI_2 + 0.01;
        let chord = super::super::euclidean(&warsaw_graph_point(u0), &warsaw_graph_point(u1));
        let arc = table.length_to(u1);
        assert!(arc >= chord && arc - chord < 1e-6, "{arc} vs {chord}");
    }

    #[test]
    fn param_inverts_length() {
        let table = ArcTable::new(40.0);
        for u in [2.0, 7.5, 19.25, 39.0] {
            let back = table.param_at(table.length_to(u));
            assert!((back - u).abs() < 1e-9, "{u} -> {back}");
        }
    }

    #[test]
    fn consecutive_samples_are_within_spacing() {
        let s = sample(500);
        for w in s.points.windows(2) {
            let chord = super::super::euclidean(&w[0], &w[1]);
            assert!(
                chord <= s.spacing * (1.0 + 1e-6),
                "{chord} {} {:?}",
                s.spacing,
                w
            );
        }
        assert!(s.x_min > 0.0 && s.x_min < FRAC_2_PI);
        assert!(s.density >= s.x_min + 0.5 * s.spacing);
    }
}
