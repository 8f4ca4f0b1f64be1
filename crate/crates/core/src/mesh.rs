//! One-dimensional meshes `t_0 < t_1 < ... < t_{m+1}` and their step sizes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::functions::AnalyticFunction;

/// Relative spread `(max h - min h) / max h` below which a mesh counts as uniform.
pub const UNIFORMITY_TOLERANCE: f64 = 1e-12;

/// Default number of trapezoid panels used to tabulate arclength.
pub const DEFAULT_QUAD_RESOLUTION: usize = 10_000;

/// Default placement of refinement points inside each step (fraction of the step).
pub const DEFAULT_INSERT_BETA: f64 = 0.7;

/// A strictly increasing set of mesh points together with the derived step
/// sizes `h_k = t_{k+1} - t_k`.
///
/// Meshes are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<f64>,
    steps: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh from explicit points, checking that they are finite and
    /// strictly increasing.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(k) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite {
                index: k,
                value: points[k],
            });
        }
        let steps: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(k) = steps.iter().position(|&h| h <= 0.0) {
            return Err(Error::InvalidMesh(format!(
                "points not strictly increasing at k = {k}: t_k = {}, t_(k+1) = {}",
                points[k],
                points[k + 1]
            )));
        }
        Ok(Self { points, steps })
    }

    /// Builds a mesh starting at `t0` from a sequence of positive steps.
    ///
    /// The steps are stored as given rather than recovered from the rounded
    /// points, which matters once a step approaches the spacing of doubles
    /// near `t_k`.
    pub fn from_steps(t0: f64, steps: &[f64]) -> Result<Self> {
        if let Some(h) = steps.iter().find(|h| **h <= 0.0 || h.is_nan()) {
            return Err(invalid("steps", format!("step {h} is not positive")));
        }
        let mut points = Vec::with_capacity(steps.len() + 1);
        let mut t = t0;
        points.push(t);
        for h in steps {
            t += h;
            points.push(t);
        }
        let mut mesh = Self::from_points(points)?;
        mesh.steps = steps.to_vec();
        Ok(mesh)
    }

    /// `n_points` equally spaced points from `a` to `b`.
    pub fn uniform(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(invalid("b", format!("need a < b, got a = {a}, b = {b}")));
        }
        if n_points < 2 {
            return Err(invalid(
                "n_points",
                format!("need at least 2, got {n_points}"),
            ));
        }
        let last = n_points - 1;
        let span = b - a;
        let points = (0..n_points)
            .map(|k| {
                if k == last {
                    b
                } else {
                    a + span * (k as f64) / (last as f64)
                }
            })
            .collect();
        Self::from_points(points)
    }

    /// Geometric mesh with `m + 2` points and steps `h_k = h0 * r^k`, `k = 0..=m`.
    ///
    /// `r == 1` produces exactly the mesh `Mesh::uniform(t0, t0 + (m+1) h0, m + 2)`.
    pub fn geometric(t0: f64, h0: f64, r: f64, m: usize) -> Result<Self> {
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(invalid("h0", format!("must be positive, got {h0}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        if r == 1.0 {
            return Self::uniform(t0, t0 + (m as f64 + 1.0) * h0, m + 2);
        }
        let steps: Vec<f64> = (0..=m).map(|k| h0 * r.powi(k as i32)).collect();
        Self::from_steps(t0, &steps)
    }

    /// Points that split the arc of `curve` over `[a, b]` into `n_points - 1`
    /// pieces of equal length, projected back onto the t-axis.
    ///
    /// Arclength is tabulated with the composite trapezoidal rule on
    /// `quad_resolution` uniform panels and inverted by linear interpolation
    /// of the cumulative table.
    pub fn equiarclength(
        curve: &AnalyticFunction,
        a: f64,
        b: f64,
        n_points: usize,
        quad_resolution: usize,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(invalid("b", format!("need a < b, got a = {a}, b = {b}")));
        }
        if n_points < 2 {
            return Err(invalid(
                "n_points",
                format!("need at least 2, got {n_points}"),
            ));
        }
        if quad_resolution < n_points {
            return Err(invalid(
                "quad_resolution",
                format!("{quad_resolution} panels cannot resolve {n_points} points"),
            ));
        }
        let cumulative = cumulative_arclength(curve, a, b, quad_resolution);
        let total = cumulative[quad_resolution];
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidMesh(format!(
                "arclength {total} is not usable"
            )));
        }
        let panel = (b - a) / quad_resolution as f64;
        let last = n_points - 1;
        let mut points = Vec::with_capacity(n_points);
        points.push(a);
        let mut j = 0;
        for k in 1..last {
            let target = total * (k as f64) / (last as f64);
            while cumulative[j + 1] < target {
                j += 1;
            }
            let s0 = cumulative[j];
            let s1 = cumulative[j + 1];
            let frac = (target - s0) / (s1 - s0);
            points.push(a + panel * (j as f64 + frac));
        }
        points.push(b);
        Self::from_points(points).map_err(|e| match e {
            Error::InvalidMesh(msg) => Error::InvalidMesh(format!(
                "quad_resolution {quad_resolution} too coarse: {msg}"
            )),
            other => other,
        })
    }

    /// Uniform base mesh of `n_steps` steps whose steps are each scaled by an
    /// independent factor in `[1 - amplitude, 1 + amplitude]`, then rescaled to
    /// span `[a, b]`. Deterministic for a given seed.
    pub fn jittered(a: f64, b: f64, n_steps: usize, amplitude: f64, seed: u64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(invalid("b", format!("need a < b, got a = {a}, b = {b}")));
        }
        if n_steps == 0 {
            return Err(invalid("n_steps", "need at least one step"));
        }
        if !(0.0..1.0).contains(&amplitude) {
            return Err(invalid(
                "amplitude",
                format!("must lie in [0, 1), got {amplitude}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n_steps)
            .map(|_| 1.0 + amplitude * rng.gen_range(-1.0..=1.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let scale = (b - a) / total;
        let steps: Vec<f64> = raw.iter().map(|w| w * scale).collect();
        let mut points = Vec::with_capacity(n_steps + 1);
        let mut t = a;
        points.push(a);
        for h in &steps[..n_steps - 1] {
            t += h;
            points.push(t);
        }
        points.push(b);
        Self::from_points(points)
    }

    /// Inserts one point `t_k + beta * h_k` inside every step.
    pub fn refine_insert(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid("beta", format!("must lie in (0, 1), got {beta}")));
        }
        let mut points = Vec::with_capacity(2 * self.points.len() - 1);
        points.push(self.points[0]);
        for (k, h) in self.steps.iter().enumerate() {
            points.push(self.points[k] + beta * h);
            points.push(self.points[k + 1]);
        }
        Self::from_points(points)
    }

    /// Ratios `h_{k+1} / h_k` for `k = 0..m-1`.
    pub fn smoothness_ratios(&self) -> Result<Vec<f64>> {
        if self.steps.len() < 2 {
            return Err(Error::InvalidMesh(
                "smoothness ratios need at least two steps".into(),
            ));
        }
        Ok(self.steps.windows(2).map(|w| w[1] / w[0]).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Number of mesh points, `m + 2`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a mesh has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `m`, with points `t_0..t_{m+1}`: index of the last step.
    pub fn m(&self) -> usize {
        self.points.len() - 2
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn point(&self, k: usize) -> f64 {
        self.points[k]
    }

    pub fn step(&self, k: usize) -> f64 {
        self.steps[k]
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min_step(&self) -> f64 {
        self.steps.iter().copied().fold(f64::MAX, f64::min)
    }

    pub fn is_uniform(&self) -> bool {
        let max = self.max_step();
        (max - self.min_step()) / max <= UNIFORMITY_TOLERANCE
    }
}

/// Cumulative composite-trapezoid arclength of `curve` at the `n + 1` nodes
/// `a + i (b - a) / n`.
pub(crate) fn cumulative_arclength(curve: &AnalyticFunction, a: f64, b: f64, n: usize) -> Vec<f64> {
    let panel = (b - a) / n as f64;
    let speed = |i: usize| {
        let t = if i == n { b } else { a + panel * i as f64 };
        let slope = curve.derivative(1, t);
        (1.0 + slope * slope).sqrt()
    };
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    let mut left = speed(0);
    for i in 1..=n {
        let right = speed(i);
        acc += 0.5 * panel * (left + right);
        cumulative.push(acc);
        left = right;
    }
    cumulative
}
