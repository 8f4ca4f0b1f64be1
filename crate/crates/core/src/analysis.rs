//! Consistency coefficients, truncation-error bounds and empirical orders of
//! accuracy.
//!
//! Two independent routes describe each composed second difference:
//!
//! * [`consistency_coefficient`] evaluates the closed-form Taylor coefficients
//!   of `f''(t_k)` and `f'''(t_k)` as functions of the local steps;
//! * [`expansion_prediction`] recovers the stencil weights by pushing unit
//!   impulses through the composed operator and takes their Taylor moments.
//!
//! Mean-value points are never located. Remainders are bounded with the
//! supremum of the relevant derivative over the stencil bracket, estimated by
//! dense sampling.

use serde::Serialize;

use crate::diffops::{FirstDiffKind, Scheme, SecondDiffSpec};
use crate::error::{invalid, Error, Result};
use crate::functions::{self, AnalyticFunction};
use crate::grid::GridFunction;
use crate::mesh::Mesh;
use crate::metrics;

/// `|leading - 1|` at or below this counts as consistent.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-12;

/// Samples per bracket when estimating a derivative supremum.
pub const SUP_SAMPLES: usize = 1001;

/// Multiplier applied to sampled suprema.
pub const SUP_SAFETY: f64 = 1.01;

/// Minimum ratio between the maximum steps of consecutive meshes in an
/// order-estimation family.
pub const MIN_REFINEMENT: f64 = 1.5;

/// Sampled supremum of `|f^(order)|` on `[lo, hi]`, inflated by [`SUP_SAFETY`].
pub fn derivative_sup(f: &AnalyticFunction, order: usize, lo: f64, hi: f64) -> f64 {
    f.sampled_sup(order, lo, hi, SUP_SAMPLES) * SUP_SAFETY
}

/// The (up to) four steps around mesh index `k`: `h_{k-2}, h_{k-1}, h_k, h_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalSteps {
    pub index: Option<usize>,
    /// `t_k`; brackets are reported relative to it.
    pub center: f64,
    pub km2: Option<f64>,
    pub km1: Option<f64>,
    pub k0: Option<f64>,
    pub kp1: Option<f64>,
}

impl LocalSteps {
    /// All four steps, centred at `t_k = 0`.
    pub fn new(km2: f64, km1: f64, k0: f64, kp1: f64) -> Self {
        Self {
            index: None,
            center: 0.0,
            km2: Some(km2),
            km1: Some(km1),
            k0: Some(k0),
            kp1: Some(kp1),
        }
    }

    /// Steps of `mesh` around index `k`; steps that fall outside the mesh are `None`.
    pub fn from_mesh(mesh: &Mesh, k: usize) -> Self {
        let h = mesh.steps();
        let step = |j: isize| {
            let i = k as isize + j;
            (i >= 0 && (i as usize) < h.len()).then(|| h[i as usize])
        };
        Self {
            index: Some(k),
            center: mesh.point(k),
            km2: step(-2),
            km1: step(-1),
            k0: step(0),
            kp1: step(1),
        }
    }

    /// Steps with `h_{l+1} = alpha h_l`, normalised so `h_{k-2} = 1`.
    pub fn geometric(alpha: f64) -> Self {
        Self::new(1.0, alpha, alpha * alpha, alpha * alpha * alpha)
    }

    fn get(&self, name: &'static str, value: Option<f64>) -> Result<f64> {
        match value {
            Some(h) if h > 0.0 && h.is_finite() => Ok(h),
            Some(h) => Err(invalid(name, format!("step must be positive, got {h}"))),
            None => Err(invalid(name, "step is required by this operator")),
        }
    }
}

/// Taylor data of one composed second difference at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub spec: SecondDiffSpec,
    pub index: Option<usize>,
    /// Multiplier of `f''(t_k)`.
    pub leading_coefficient: f64,
    /// Multiplier of `f'''(t_k)`.
    pub fppp_coefficient: f64,
    pub consistent: bool,
    /// Interval containing every mean-value point of the expansion.
    pub remainder_bracket: [f64; 2],
}

#[derive(Serialize)]
struct ReportJson<'a> {
    spec: String,
    k: Option<usize>,
    leading_coefficient: f64,
    fppp_coefficient: f64,
    consistent: bool,
    bracket: &'a [f64; 2],
}

impl Serialize for ConsistencyReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            spec: self.spec.to_string(),
            k: self.index,
            leading_coefficient: self.leading_coefficient,
            fppp_coefficient: self.fppp_coefficient,
            consistent: self.consistent,
            bracket: &self.remainder_bracket,
        }
        .serialize(s)
    }
}

/// Closed-form `f''` and `f'''` coefficients of `spec` for the given steps.
/// Only the steps the operator touches need to be present.
pub fn consistency_coefficient(
    spec: SecondDiffSpec,
    steps: &LocalSteps,
) -> Result<ConsistencyReport> {
    use FirstDiffKind::*;
    let (left, right) = spec.reach();
    let hm2 = || steps.get("h_(k-2)", steps.km2);
    let hm1 = || steps.get("h_(k-1)", steps.km1);
    let h0 = || steps.get("h_k", steps.k0);
    let hp1 = || steps.get("h_(k+1)", steps.kp1);

    let (leading, fppp) = match (spec.outer, spec.inner) {
        (Forward, Forward) => {
            let (c, d) = (h0()?, hp1()?);
            ((d + c) / (2.0 * c), (d + c) * (d + 2.0 * c) / (6.0 * c))
        }
        (Backward, Backward) => {
            let (a, b) = (hm2()?, hm1()?);
            ((b + a) / (2.0 * b), -(b + a) * (2.0 * b + a) / (6.0 * b))
        }
        (Central, Central) => {
            let (a, b, c, d) = (hm2()?, hm1()?, h0()?, hp1()?);
            (
                (d + c + b + a) / (2.0 * (c + b)),
                ((d + c).powi(2) - (b + a).powi(2)) / (6.0 * (c + b)),
            )
        }
        (Forward, Backward) => {
            let (b, c) = (hm1()?, h0()?);
            ((c + b) / (2.0 * c), (c * c - b * b) / (6.0 * c))
        }
        (Backward, Forward) => {
            let (b, c) = (hm1()?, h0()?);
            ((c + b) / (2.0 * b), (c * c - b * b) / (6.0 * b))
        }
        (Forward, Central) => {
            let (b, c, d) = (hm1()?, h0()?, hp1()?);
            (
                (d + b) / (2.0 * c),
                ((d + c).powi(2) - c * c + c * b - b * b) / (6.0 * c),
            )
        }
        (Central, Forward) => {
            let (b, c, d) = (hm1()?, h0()?, hp1()?);
            (
                (d + 2.0 * c + b) / (2.0 * (c + b)),
                ((c + d).powi(3) - c.powi(3) - d * b * b) / (6.0 * d * (c + b)),
            )
        }
        (Backward, Central) => {
            let (a, b, c) = (hm2()?, hm1()?, h0()?);
            (
                (c + a) / (2.0 * b),
                (c.powi(3) + b.powi(3) - (c + b) * (b + a).powi(2)) / (6.0 * (c + b) * b),
            )
        }
        (Central, Backward) => {
            let (a, b, c) = (hm2()?, hm1()?, h0()?);
            (
                (c + 2.0 * b + a) / (2.0 * (c + b)),
                (a * c * c + b.powi(3) - (b + a).powi(3)) / (6.0 * a * (c + b)),
            )
        }
    };

    let extent_left = match left {
        0 => 0.0,
        1 => hm1()?,
        _ => hm1()? + hm2()?,
    };
    let extent_right = match right {
        0 => 0.0,
        1 => h0()?,
        _ => h0()? + hp1()?,
    };
    Ok(ConsistencyReport {
        spec,
        index: steps.index,
        leading_coefficient: leading,
        fppp_coefficient: fppp,
        consistent: (leading - 1.0).abs() <= CONSISTENCY_TOLERANCE,
        remainder_bracket: [steps.center - extent_left, steps.center + extent_right],
    })
}

fn check_index(
    op: impl std::fmt::Display,
    reach: (usize, usize),
    mesh: &Mesh,
    k: usize,
) -> Result<()> {
    let (left, right) = reach;
    if mesh.len() < left + right + 1 || k < left || k + right >= mesh.len() {
        return Err(Error::InvalidIndex {
            op: op.to_string(),
            index: k,
            lo: left,
            hi: mesh.len().saturating_sub(right + 1),
        });
    }
    Ok(())
}

/// [`consistency_coefficient`] with the steps of `mesh` around index `k`.
pub fn consistency_report(
    spec: SecondDiffSpec,
    mesh: &Mesh,
    k: usize,
) -> Result<ConsistencyReport> {
    check_index(spec, spec.reach(), mesh, k)?;
    consistency_coefficient(spec, &LocalSteps::from_mesh(mesh, k))
}

/// Leading coefficient of `spec` on a mesh whose steps grow by the constant
/// factor `alpha`. Equals one iff `alpha == 1`.
pub fn geometric_consistency(spec: SecondDiffSpec, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha", format!("must be positive, got {alpha}")));
    }
    Ok(consistency_coefficient(spec, &LocalSteps::geometric(alpha))?.leading_coefficient)
}

/// Weights `w_j` with `scheme(u)(t_k) = sum_j w_j u_j`, obtained by applying
/// the operator to unit impulses. Returned as `(mesh index, weight)`.
pub fn stencil_weights(scheme: Scheme, mesh: &Mesh, k: usize) -> Result<Vec<(usize, f64)>> {
    let (left, right) = scheme.reach();
    check_index(scheme, (left, right), mesh, k)?;
    let lo = k - left;
    let width = left + right + 1;
    (0..width)
        .map(|j| {
            let mut impulse = vec![0.0; width];
            impulse[j] = 1.0;
            let u = GridFunction::new(mesh, lo, impulse)?;
            let out = scheme.apply(&u)?;
            debug_assert_eq!((out.first(), out.last()), (k, k));
            Ok((lo + j, out.values()[0]))
        })
        .collect()
}

/// Result of [`expansion_prediction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    /// Truncated Taylor sum `sum_{i=2}^{n-1} c_i f^(i)(t_k)`.
    pub predicted: f64,
    /// Bound on the Lagrange remainder terms of order `remainder_order`.
    pub remainder_bound: f64,
    /// Order of the derivative appearing in the remainder.
    pub remainder_order: usize,
    /// `taylor_coefficients[i]` multiplies `f^(i)(t_k)`.
    pub taylor_coefficients: Vec<f64>,
    /// The operator applied to samples of `f`.
    pub direct: f64,
    /// `sum_j |w_j f(t_j)|`, the magnitude governing rounding in `direct`.
    pub rounding_scale: f64,
    pub bracket: [f64; 2],
}

/// Remainder order used by the expansion of each composed difference: five
/// for the three pairs whose expansion carries an explicit `f''''(t_k)` term,
/// four for the rest.
pub fn remainder_order(spec: SecondDiffSpec) -> usize {
    use FirstDiffKind::*;
    match (spec.outer, spec.inner) {
        (Central, Central) | (Forward, Backward) | (Backward, Forward) => 5,
        _ => 4,
    }
}

/// Taylor prediction of `spec` applied to `f` at mesh index `k`, with a bound
/// on the remainder.
pub fn expansion_prediction(
    spec: SecondDiffSpec,
    f: &AnalyticFunction,
    mesh: &Mesh,
    k: usize,
) -> Result<Expansion> {
    let weights = stencil_weights(Scheme::Second(spec), mesh, k)?;
    let n = remainder_order(spec);
    let tk = mesh.point(k);
    let (lo, hi) = (
        mesh.point(weights[0].0),
        mesh.point(weights[weights.len() - 1].0),
    );

    let mut factorial = 1.0;
    let mut taylor_coefficients = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            factorial *= i as f64;
        }
        let moment: f64 = weights
            .iter()
            .map(|&(j, w)| w * (mesh.point(j) - tk).powi(i as i32))
            .sum();
        taylor_coefficients.push(moment / factorial);
    }
    let predicted = (2..n)
        .map(|i| taylor_coefficients[i] * f.derivative(i, tk))
        .sum();

    let factorial_n = factorial * n as f64;
    let remainder_weight: f64 = weights
        .iter()
        .map(|&(j, w)| w.abs() * (mesh.point(j) - tk).abs().powi(n as i32))
        .sum::<f64>()
        / factorial_n;
    let remainder_bound = remainder_weight * derivative_sup(f, n, lo, hi);

    let window: Vec<f64> = weights
        .iter()
        .map(|&(j, _)| f.value(mesh.point(j)))
        .collect();
    let u = GridFunction::new(mesh, weights[0].0, window)?;
    let direct = crate::diffops::second_difference(spec, &u)?.values()[0];
    let rounding_scale = weights
        .iter()
        .zip(u.values())
        .map(|(&(_, w), v)| (w * v).abs())
        .sum();

    Ok(Expansion {
        predicted,
        remainder_bound,
        remainder_order: n,
        taylor_coefficients,
        direct,
        rounding_scale,
        bracket: [lo, hi],
    })
}

/// Rigorous (up to sup sampling) bound on `|difference - f'(t_k)|` for one
/// first difference.
pub fn first_diff_error_bound(
    kind: FirstDiffKind,
    f: &AnalyticFunction,
    mesh: &Mesh,
    k: usize,
) -> Result<f64> {
    check_index(kind, kind.reach(), mesh, k)?;
    let t = mesh.points();
    let h = mesh.steps();
    Ok(match kind {
        FirstDiffKind::Forward => h[k] / 2.0 * derivative_sup(f, 2, t[k], t[k + 1]),
        FirstDiffKind::Backward => h[k - 1] / 2.0 * derivative_sup(f, 2, t[k - 1], t[k]),
        FirstDiffKind::Central if mesh.is_uniform() => {
            let step = h[k].max(h[k - 1]);
            step * step / 3.0 * derivative_sup(f, 3, t[k - 1], t[k + 1])
        }
        FirstDiffKind::Central => {
            let ahead = h[k] * h[k] * derivative_sup(f, 2, t[k], t[k + 1]);
            let behind = h[k - 1] * h[k - 1] * derivative_sup(f, 2, t[k - 1], t[k]);
            (ahead + behind) / (2.0 * (h[k] + h[k - 1]))
        }
    })
}

/// Least-squares fit of `log(sgei)` against `log(max step)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// `(max step, sgei)` for every mesh, coarsest first.
    pub samples: Vec<(f64, f64)>,
    /// Whether the coarsest sample was left out of the fit.
    pub excluded_coarsest: bool,
}

/// Ordinary least-squares line through `(ln x, ln y)`; returns `(slope, intercept)`.
pub fn loglog_fit(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// sgei of `scheme` applied to samples of `f` against the exact derivative
/// of the matching order, scaled by the sampled maximum.
pub fn scheme_sgei(
    scheme: Scheme,
    f: &AnalyticFunction,
    mesh: &Mesh,
) -> Result<metrics::SldSeries> {
    let u = functions::sample(f, 0, mesh)?;
    let approx = scheme.apply(&u)?;
    let exact = functions::sample(f, scheme.derivative_order(), mesh)?;
    metrics::scaled_local_difference(&exact, &approx)
}

/// Estimates the order of accuracy of `scheme` on a family of meshes with
/// decreasing maximum step.
///
/// The coarsest mesh is dropped when its sgei exceeds one and at least three
/// meshes remain.
pub fn empirical_order(
    scheme: Scheme,
    f: &AnalyticFunction,
    family: &[Mesh],
) -> Result<OrderEstimate> {
    if family.len() < 3 {
        return Err(Error::DegenerateFamily(format!(
            "need at least 3 meshes, got {}",
            family.len()
        )));
    }
    for pair in family.windows(2) {
        let (coarse, fine) = (pair[0].max_step(), pair[1].max_step());
        if coarse < MIN_REFINEMENT * fine {
            return Err(Error::DegenerateFamily(format!(
                "max step must shrink by at least {MIN_REFINEMENT}x between meshes ({coarse} -> {fine})"
            )));
        }
    }
    let samples = family
        .iter()
        .map(|mesh| Ok((mesh.max_step(), scheme_sgei(scheme, f, mesh)?.sgei)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(&(h, _)) = samples.iter().find(|s| s.1 <= 0.0 || s.1.is_nan()) {
        return Err(Error::DegenerateFamily(format!(
            "sgei vanished at max step {h}; the operator is exact for this function"
        )));
    }
    let excluded_coarsest = samples[0].1 > 1.0 && samples.len() > 3;
    let fitted = if excluded_coarsest {
        &samples[1..]
    } else {
        &samples[..]
    };
    let (slope, intercept) = loglog_fit(fitted);
    Ok(OrderEstimate {
        slope,
        intercept,
        samples,
        excluded_coarsest,
    })
}
