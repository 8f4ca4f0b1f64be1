//! Analytic test functions with exact derivatives up to order five.
//!
//! These are the reference ("exact") side of every error measurement.

use std::fmt;

use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::mesh::Mesh;
use crate::parse;

/// Highest derivative order any function here provides.
pub const MAX_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `amplitude * sin(frequency * t + phase)`
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Ascending coefficients `c_0 + c_1 t + ...`
    Polynomial(Vec<f64>),
    /// `value * cos(w (t - t0)) + (slope / w) * sin(w (t - t0))`, `w = sqrt(kappa)`
    Oscillator {
        kappa: f64,
        t0: f64,
        value: f64,
        slope: f64,
    },
}

/// A function together with its exact derivatives of order `0..=MAX_ORDER`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    label: String,
    kind: Kind,
}

/// `sin(x + n pi / 2)` without rounding the quarter turns.
fn sin_shifted(sin_x: f64, cos_x: f64, n: usize) -> f64 {
    match n % 4 {
        0 => sin_x,
        1 => cos_x,
        2 => -sin_x,
        _ => -cos_x,
    }
}

impl AnalyticFunction {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// The exact `order`-th derivative at `t`.
    ///
    /// # Panics
    ///
    /// If `order > MAX_ORDER`.
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        assert!(
            order <= MAX_ORDER,
            "derivative order {order} exceeds {MAX_ORDER}"
        );
        match &self.kind {
            Kind::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                let (s, c) = (frequency * t + phase).sin_cos();
                amplitude * frequency.powi(order as i32) * sin_shifted(s, c, order)
            }
            Kind::Polynomial(coefficients) => coefficients
                .iter()
                .enumerate()
                .skip(order)
                .rev()
                .fold(0.0, |acc, (p, c)| {
                    let falling: f64 = ((p - order + 1)..=p).map(|j| j as f64).product();
                    acc * t + c * falling
                }),
            Kind::Oscillator {
                kappa,
                t0,
                value,
                slope,
            } => {
                let w = kappa.sqrt();
                let (s, c) = (w * (t - t0)).sin_cos();
                // cos x = sin(x + pi/2)
                let wn = w.powi(order as i32);
                wn * (value * sin_shifted(s, c, order + 1) + slope / w * sin_shifted(s, c, order))
            }
        }
    }

    /// Largest |f^(order)| over `samples` equally spaced points of `[lo, hi]`.
    pub fn sampled_sup(&self, order: usize, lo: f64, hi: f64, samples: usize) -> f64 {
        let n = samples.max(2) - 1;
        (0..=n)
            .map(|i| {
                let t = if i == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / n as f64
                };
                self.derivative(order, t).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `amplitude * sin(frequency * t + phase)`.
pub fn sinusoid(amplitude: f64, frequency: f64, phase: f64) -> AnalyticFunction {
    AnalyticFunction {
        label: format!("sinusoid:amplitude={amplitude},frequency={frequency},phase={phase}"),
        kind: Kind::Sinusoid {
            amplitude,
            frequency,
            phase,
        },
    }
}

/// Polynomial with ascending coefficients; degree at most `MAX_ORDER`.
pub fn polynomial(coefficients: &[f64]) -> Result<AnalyticFunction> {
    if coefficients.len() > MAX_ORDER + 1 {
        return Err(invalid(
            "coefficients",
            format!("degree {} exceeds {MAX_ORDER}", coefficients.len() - 1),
        ));
    }
    if coefficients.is_empty() {
        return Err(invalid("coefficients", "need at least one coefficient"));
    }
    let label = format!(
        "polynomial:{}",
        coefficients
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(AnalyticFunction {
        label,
        kind: Kind::Polynomial(coefficients.to_vec()),
    })
}

/// Exact solution of `phi'' = -kappa phi` with `phi(0) = 1`, `phi'(0) = -1`.
pub fn oscillator_solution(kappa: f64) -> Result<AnalyticFunction> {
    oscillator(kappa, 0.0, 1.0, -1.0)
}

/// Exact solution of `phi'' = -kappa phi` with `phi(t0) = value`, `phi'(t0) = slope`.
pub fn oscillator(kappa: f64, t0: f64, value: f64, slope: f64) -> Result<AnalyticFunction> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("must be positive, got {kappa}")));
    }
    Ok(AnalyticFunction {
        label: format!("oscillator:kappa={kappa},t0={t0},value={value},slope={slope}"),
        kind: Kind::Oscillator {
            kappa,
            t0,
            value,
            slope,
        },
    })
}

/// Samples `f^(order)` at every mesh point.
pub fn sample<'m>(f: &AnalyticFunction, order: usize, mesh: &'m Mesh) -> Result<GridFunction<'m>> {
    if order > MAX_ORDER {
        return Err(invalid("order", format!("{order} exceeds {MAX_ORDER}")));
    }
    let values = mesh
        .points()
        .iter()
        .map(|&t| f.derivative(order, t))
        .collect();
    GridFunction::new(mesh, 0, values)
}

/// Looks a function up by its CLI label.
///
/// Accepted forms:
/// - `sinusoid:amplitude=-1,frequency=4pi,phase=0` (every key optional; defaults 1, 1, 0)
/// - `polynomial:c0,c1,...` (ascending coefficients), alias `poly:`
/// - `oscillator:kappa=4pi^2` with optional `t0`, `value`, `slope`
pub fn from_label(label: &str) -> Result<AnalyticFunction> {
    let (name, args, offset) = match label.split_once(':') {
        Some((n, a)) => (n.trim(), a, n.len() + 1),
        None => (label.trim(), "", label.len()),
    };
    match name {
        "sinusoid" | "sin" => {
            let kv = parse::key_values(args, offset, &["amplitude", "frequency", "phase"])?;
            Ok(sinusoid(
                kv.get("amplitude").unwrap_or(1.0),
                kv.get("frequency").unwrap_or(1.0),
                kv.get("phase").unwrap_or(0.0),
            ))
        }
        "polynomial" | "poly" => {
            let coefficients = parse::number_list(args, offset)?;
            polynomial(&coefficients).map_err(|e| parse::error_at(offset + 1, e.to_string()))
        }
        "oscillator" => {
            let kv = parse::key_values(args, offset, &["kappa", "t0", "value", "slope"])?;
            let kappa = kv
                .get("kappa")
                .ok_or_else(|| parse::error_at(offset + 1, "oscillator needs kappa=<value>"))?;
            oscillator(
                kappa,
                kv.get("t0").unwrap_or(0.0),
                kv.get("value").unwrap_or(1.0),
                kv.get("slope").unwrap_or(-1.0),
            )
            .map_err(|e| parse::error_at(offset + 1, e.to_string()))
        }
        other => Err(parse::error_at(
            1,
            format!("unknown function `{other}` (expected sinusoid, polynomial or oscillator)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sinusoid_matches_closed_forms() {
        let f = sinusoid(-1.0, 4.0 * PI, 0.0);
        for t in [0.0, 0.13, 0.5, 0.77] {
            assert!((f.derivative(1, t) + 4.0 * PI * (4.0 * PI * t).cos()).abs() < 1e-12);
            let expected = (4.0 * PI).powi(2) * (4.0 * PI * t).sin();
            assert!((f.derivative(2, t) - expected).abs() < 1e-10);
        }
        let g = sinusoid(1.0, 2.0 * PI, 0.0);
        assert!((g.value(0.25) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_derivatives() {
        let sq = polynomial(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sq.derivative(2, 3.7), 2.0);
        let lin = polynomial(&[0.0, 2.0]).unwrap();
        assert_eq!(lin.derivative(1, -5.0), 2.0);
        let cube = polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cube.derivative(3, 0.4), 6.0);
        assert_eq!(cube.derivative(4, 0.4), 0.0);
        assert_eq!(cube.derivative(1, 2.0), 12.0);
        assert!(polynomial(&[1.0; 7]).is_err());
    }

    #[test]
    fn oscillator_initial_data_and_equation() {
        let kappa = 4.0 * PI * PI;
        let phi = oscillator_solution(kappa).unwrap();
        assert!((phi.value(0.0) - 1.0).abs() < 1e-15);
        assert!((phi.derivative(1, 0.0) + 1.0).abs() < 1e-15);
        assert!((phi.value(0.5) + 1.0).abs() < 1e-12);
        for t in [0.0, 0.2, 0.61, 1.3] {
            for n in 0..=3 {
                let lhs = phi.derivative(n + 2, t);
                let rhs = -kappa * phi.derivative(n, t);
                assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
            }
        }
        assert!(oscillator_solution(0.0).is_err());
        assert!(oscillator_solution(-1.0).is_err());
    }

    #[test]
    fn sample_values() {
        let mesh = Mesh::from_points(vec![0.0, 0.1, 0.3]).unwrap();
        let sq = polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let u = sample(&sq, 0, &mesh).unwrap();
        let expected = [0.0, 0.01, 0.09];
        for (v, e) in u.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-16);
        }
        let one = polynomial(&[1.0]).unwrap();
        assert!(sample(&one, 0, &mesh)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 1.0));
        assert!(sample(&one, 6, &mesh).is_err());
    }

    /// Every derivative table entry agrees with a central difference of the
    /// entry below it.
    #[test]
    fn derivative_tables_are_internally_consistent() {
        use rand::{Rng, SeedableRng};
        let functions = [
            sinusoid(-1.0, 4.0 * PI, 0.0),
            sinusoid(0.8, 3.0, 0.4),
            polynomial(&[0.3, -1.0, 2.0, 0.5, -0.25, 0.1]).unwrap(),
            oscillator_solution(4.0 * PI * PI).unwrap(),
            oscillator(2.5, 0.3, -0.7, 1.9).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let eps = 1e-6;
        for f in &functions {
            for _ in 0..20 {
                let t: f64 = rng.gen_range(0.0..1.0);
                for n in 0..MAX_ORDER {
                    let fd = (f.derivative(n, t + eps) - f.derivative(n, t - eps)) / (2.0 * eps);
                    let exact = f.derivative(n + 1, t);
                    let scale = f.sampled_sup(n + 1, 0.0, 1.0, 201).max(1e-300);
                    assert!(
                        (fd - exact).abs() <= 1e-6 * scale,
                        "{f} order {n} at {t}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn labels_round_trip_through_registry() {
        let f = from_label("sinusoid:amplitude=-1,frequency=4pi").unwrap();
        assert_eq!(f.kind, sinusoid(-1.0, 4.0 * PI, 0.0).kind);
        let p = from_label("poly:0,0,1").unwrap();
        assert_eq!(p.derivative(2, 1.0), 2.0);
        let o = from_label("oscillator:kappa=4pi^2").unwrap();
        assert_eq!(o.kind, oscillator_solution(4.0 * PI * PI).unwrap().kind);
        assert!(from_label("cosh:1").is_err());
        assert!(from_label("sinusoid:amp=2").is_err());
        let again = from_label(f.label()).unwrap();
        assert_eq!(again.kind, f.kind);
    }
}
