//! First differences, composed second differences and the corrected
//! nonuniform second difference.
//!
//! Every operator maps a [`GridFunction`] to a new one on a narrower index
//! window. Composition is the primitive: `second_difference(P, Q)` literally
//! applies `Q` and then `P`. The closed-form stencils in [`closed`] are kept
//! separate so the two routes can be checked against each other.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::parse::error_at;

/// Forward `D+`, backward `D-` or central `δ` divided difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FirstDiffKind {
    Forward,
    Backward,
    Central,
}

impl FirstDiffKind {
    pub const ALL: [FirstDiffKind; 3] = [Self::Forward, Self::Backward, Self::Central];

    /// Number of neighbours used to the left and to the right.
    pub const fn reach(self) -> (usize, usize) {
        match self {
            Self::Forward => (0, 1),
            Self::Backward => (1, 0),
            Self::Central => (1, 1),
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Self::Forward => "d+",
            Self::Backward => "d-",
            Self::Central => "c",
        }
    }
}

impl fmt::Display for FirstDiffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for FirstDiffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "d+" | "D+" => Ok(Self::Forward),
            "d-" | "D-" => Ok(Self::Backward),
            "c" | "delta" => Ok(Self::Central),
            other => Err(error_at(
                1,
                format!("unknown difference `{other}` (expected d+, d- or c)"),
            )),
        }
    }
}

/// The composition `outer(inner(u))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SecondDiffSpec {
    pub outer: FirstDiffKind,
    pub inner: FirstDiffKind,
}

impl SecondDiffSpec {
    pub const fn new(outer: FirstDiffKind, inner: FirstDiffKind) -> Self {
        Self { outer, inner }
    }

    /// All nine ordered pairs.
    pub fn all() -> impl Iterator<Item = SecondDiffSpec> {
        FirstDiffKind::ALL.into_iter().flat_map(|outer| {
            FirstDiffKind::ALL
                .into_iter()
                .map(move |inner| Self::new(outer, inner))
        })
    }

    pub const fn reach(self) -> (usize, usize) {
        let (ol, or) = self.outer.reach();
        let (il, ir) = self.inner.reach();
        (ol + il, or + ir)
    }

    /// The pair with outer and inner swapped.
    pub const fn swapped(self) -> Self {
        Self::new(self.inner, self.outer)
    }
}

impl fmt::Display for SecondDiffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.outer, self.inner)
    }
}

impl FromStr for SecondDiffSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Scheme>()? {
            Scheme::Second(spec) => Ok(spec),
            other => Err(error_at(
                1,
                format!("`{other}` is not a composed second difference"),
            )),
        }
    }
}

/// Any operator the toolkit can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    First(FirstDiffKind),
    Second(SecondDiffSpec),
    /// `(D+u - D-u) / ((h_{k-1} + h_k) / 2)`
    Corrected,
}

impl Scheme {
    /// Order of the derivative the operator approximates.
    pub const fn derivative_order(self) -> usize {
        match self {
            Self::First(_) => 1,
            Self::Second(_) | Self::Corrected => 2,
        }
    }

    pub const fn reach(self) -> (usize, usize) {
        match self {
            Self::First(kind) => kind.reach(),
            Self::Second(spec) => spec.reach(),
            Self::Corrected => (1, 1),
        }
    }

    pub fn apply<'m>(self, u: &GridFunction<'m>) -> Result<GridFunction<'m>> {
        match self {
            Self::First(kind) => first_difference(kind, u),
            Self::Second(spec) => second_difference(spec, u),
            Self::Corrected => d2_corrected(u),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::First(kind) => kind.fmt(f),
            Self::Second(spec) => spec.fmt(f),
            Self::Corrected => f.write_str("d2"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// `d+`, `d-`, `c`, `d2`, or two first differences separated by
    /// whitespace, outer first (`d+ d-`).
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(j)) => {
                    tokens.push((&s[j..i], j));
                    start = None;
                }
                _ => {}
            }
        }
        let kind = |(tok, col): (&str, usize)| {
            tok.parse::<FirstDiffKind>().map_err(|_| {
                error_at(
                    col + 1,
                    format!("unknown difference `{tok}` (expected d+, d- or c)"),
                )
            })
        };
        match tokens.as_slice() {
            [("d2", _)] => Ok(Self::Corrected),
            [single] => Ok(Self::First(kind(*single)?)),
            [outer, inner] => Ok(Self::Second(SecondDiffSpec::new(
                kind(*outer)?,
                kind(*inner)?,
            ))),
            [] => Err(error_at(1, "empty operator")),
            [_, _, extra, ..] => Err(error_at(
                extra.1 + 1,
                "at most two differences may be composed",
            )),
        }
    }
}

fn need(op: impl fmt::Display, needed: usize, u: &GridFunction<'_>) -> Result<()> {
    if u.len() < needed {
        return Err(Error::WindowTooSmall {
            op: op.to_string(),
            needed,
            available: u.len(),
        });
    }
    Ok(())
}

/// Applies one first difference.
///
/// Output windows for an input on `first..=last`:
/// forward `first..=last-1`, backward `first+1..=last`, central `first+1..=last-1`.
pub fn first_difference<'m>(kind: FirstDiffKind, u: &GridFunction<'m>) -> Result<GridFunction<'m>> {
    let (left, right) = kind.reach();
    need(kind, left + right + 1, u)?;
    let mesh = u.mesh();
    let t = mesh.points();
    let h = mesh.steps();
    let v = u.values();
    let first = u.first();
    let values: Vec<f64> = match kind {
        FirstDiffKind::Forward => v
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[1] - w[0]) / h[first + i])
            .collect(),
        FirstDiffKind::Backward => v
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[1] - w[0]) / h[first + i])
            .collect(),
        FirstDiffKind::Central => v
            .windows(3)
            .enumerate()
            .map(|(i, w)| {
                let k = first + i + 1;
                (w[2] - w[0]) / (t[k + 1] - t[k - 1])
            })
            .collect(),
    };
    GridFunction::new(mesh, first + left, values)
}

/// `outer(inner(u))`, computed as two first-difference passes.
pub fn second_difference<'m>(
    spec: SecondDiffSpec,
    u: &GridFunction<'m>,
) -> Result<GridFunction<'m>> {
    let (left, right) = spec.reach();
    need(spec, left + right + 1, u)?;
    let inner = first_difference(spec.inner, u)?;
    first_difference(spec.outer, &inner)
}

/// The corrected second difference at interior points of the window.
pub fn d2_corrected<'m>(u: &GridFunction<'m>) -> Result<GridFunction<'m>> {
    need(Scheme::Corrected, 3, u)?;
    let mesh = u.mesh();
    let h = mesh.steps();
    let first = u.first();
    let values = u
        .values()
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let k = first + i + 1;
            let forward = (w[2] - w[1]) / h[k];
            let backward = (w[1] - w[0]) / h[k - 1];
            (forward - backward) / ((h[k - 1] + h[k]) / 2.0)
        })
        .collect();
    GridFunction::new(mesh, first + 1, values)
}

/// Closed-form three-to-five point stencils for the composed differences,
/// written out as single fractions.
pub mod closed {
    use super::*;

    /// Evaluates the closed stencil of `spec` at mesh index `k`. The caller
    /// guarantees `k - left .. k + right` lies inside the window of `u`.
    fn at(spec: SecondDiffSpec, u: &GridFunction<'_>, k: usize) -> f64 {
        use FirstDiffKind::*;
        let h = u.mesh().steps();
        let f = |j: isize| u.at((k as isize + j) as usize).unwrap_or(f64::NAN);
        let hs = |j: isize| h[(k as isize + j) as usize];
        match (spec.outer, spec.inner) {
            (Forward, Backward) => {
                let (hk, hm) = (hs(0), hs(-1));
                (hm * f(1) - (hk + hm) * f(0) + hk * f(-1)) / (hk * hk * hm)
            }
            (Backward, Forward) => {
                let (hk, hm) = (hs(0), hs(-1));
                (hm * f(1) - (hk + hm) * f(0) + hk * f(-1)) / (hk * hm * hm)
            }
            (Forward, Forward) => {
                let (hk, hp) = (hs(0), hs(1));
                (hk * f(2) - (hp + hk) * f(1) + hp * f(0)) / (hp * hk * hk)
            }
            (Backward, Backward) => {
                let (hm, hm2) = (hs(-1), hs(-2));
                (hm2 * f(0) - (hm + hm2) * f(-1) + hm * f(-2)) / (hm * hm * hm2)
            }
            (Forward, Central) => {
                let (hp, hk, hm) = (hs(1), hs(0), hs(-1));
                ((hk + hm) * (f(2) - f(0)) - (hp + hk) * (f(1) - f(-1)))
                    / ((hp + hk) * hk * (hk + hm))
            }
            (Central, Forward) => {
                let (hp, hk, hm) = (hs(1), hs(0), hs(-1));
                (hm * (f(2) - f(1)) - hp * (f(0) - f(-1))) / (hp * (hm + hk) * hm)
            }
            (Central, Central) => {
                let (hp, hk, hm, hm2) = (hs(1), hs(0), hs(-1), hs(-2));
                ((hm + hm2) * f(2) - (hp + hk + hm + hm2) * f(0) + (hp + hk) * f(-2))
                    / ((hp + hk) * (hk + hm) * (hm + hm2))
            }
            (Backward, Central) => {
                let (hk, hm, hm2) = (hs(0), hs(-1), hs(-2));
                ((hm + hm2) * f(1) - (hk + hm) * f(0) - (hm + hm2) * f(-1) + (hk + hm) * f(-2))
                    / ((hk + hm) * hm * (hm + hm2))
            }
            (Central, Backward) => {
                let (hk, hm, hm2) = (hs(0), hs(-1), hs(-2));
                (hm2 * (f(1) - f(0)) - hk * (f(-1) - f(-2))) / (hk * hm2 * (hk + hm))
            }
        }
    }

    /// The closed stencil of `spec` over the same output window that
    /// [`second_difference`](super::second_difference) produces.
    pub fn evaluate<'m>(spec: SecondDiffSpec, u: &GridFunction<'m>) -> Result<GridFunction<'m>> {
        let (left, right) = spec.reach();
        need(spec, left + right + 1, u)?;
        let lo = u.first() + left;
        let hi = u.last() - right;
        let values = (lo..=hi).map(|k| at(spec, u, k)).collect();
        GridFunction::new(u.mesh(), lo, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{polynomial, sample, sinusoid};
    use crate::mesh::Mesh;
    use std::f64::consts::PI;
    use FirstDiffKind::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn forward_exact_on_linear() {
        let mesh = Mesh::from_points(vec![0.0, 0.1, 0.35, 0.4, 1.0]).unwrap();
        let f = polynomial(&[0.5, 2.0]).unwrap();
        let u = sample(&f, 0, &mesh).unwrap();
        for kind in FirstDiffKind::ALL {
            let d = first_difference(kind, &u).unwrap();
            assert!(d.values().iter().all(|&v| close(v, 2.0, 1e-14)), "{kind}");
        }
    }

    #[test]
    fn windows_shrink_per_kind() {
        let mesh = Mesh::uniform(0.0, 1.0, 8).unwrap();
        let u = sample(&sinusoid(1.0, 1.0, 0.0), 0, &mesh).unwrap();
        let f = first_difference(Forward, &u).unwrap();
        let b = first_difference(Backward, &u).unwrap();
        let c = first_difference(Central, &u).unwrap();
        assert_eq!((f.first(), f.last()), (0, 6));
        assert_eq!((b.first(), b.last()), (1, 7));
        assert_eq!((c.first(), c.last()), (1, 6));
        let cc = second_difference(SecondDiffSpec::new(Central, Central), &u).unwrap();
        assert_eq!((cc.first(), cc.last()), (2, 5));
        let ff = second_difference(SecondDiffSpec::new(Forward, Forward), &u).unwrap();
        assert_eq!((ff.first(), ff.last()), (0, 5));
        let d2 = d2_corrected(&u).unwrap();
        assert_eq!((d2.first(), d2.last()), (1, 6));
    }

    #[test]
    fn central_on_square_uniform_is_two_t() {
        let mesh = Mesh::uniform(-1.0, 2.0, 13).unwrap();
        let u = sample(&polynomial(&[0.0, 0.0, 1.0]).unwrap(), 0, &mesh).unwrap();
        let c = first_difference(Central, &u).unwrap();
        for (_, t, v) in c.iter() {
            assert!((v - 2.0 * t).abs() < 1e-13, "{t}: {v}");
        }
    }

    #[test]
    fn forward_forward_on_square_three_points() {
        let mesh = Mesh::from_points(vec![0.0, 0.1, 0.3]).unwrap();
        let u = sample(&polynomial(&[0.0, 0.0, 1.0]).unwrap(), 0, &mesh).unwrap();
        let d = second_difference(SecondDiffSpec::new(Forward, Forward), &u).unwrap();
        assert_eq!(d.first(), 0);
        assert_eq!(d.len(), 1);
        assert!((d.values()[0] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn forward_backward_uniform_is_standard_stencil() {
        let mesh = Mesh::uniform(0.0, 1.0, 11).unwrap();
        let u = sample(&sinusoid(1.3, 5.0, 0.2), 0, &mesh).unwrap();
        let d = second_difference(SecondDiffSpec::new(Forward, Backward), &u).unwrap();
        let h = 0.1;
        for (k, _, v) in d.iter() {
            let v0 = u.at(k).unwrap();
            let standard = (u.at(k + 1).unwrap() - 2.0 * v0 + u.at(k - 1).unwrap()) / (h * h);
            assert!(close(v, standard, 1e-11), "{k}: {v} vs {standard}");
        }
    }

    #[test]
    fn corrected_exact_on_quadratics() {
        let mesh = Mesh::from_points(vec![0.0, 0.05, 0.3, 0.32, 0.9, 1.0]).unwrap();
        let u = sample(&polynomial(&[1.0, -3.0, 1.0]).unwrap(), 0, &mesh).unwrap();
        let d = d2_corrected(&u).unwrap();
        assert!(
            d.values().iter().all(|&v| close(v, 2.0, 1e-12)),
            "{:?}",
            d.values()
        );
    }

    #[test]
    fn corrected_matches_forward_backward_on_uniform() {
        let mesh = Mesh::uniform(0.0, 1.0, 17).unwrap();
        let u = sample(&sinusoid(-1.0, 4.0 * PI, 0.0), 0, &mesh).unwrap();
        let a = d2_corrected(&u).unwrap();
        let b = second_difference(SecondDiffSpec::new(Forward, Backward), &u).unwrap();
        assert_eq!((a.first(), a.last()), (b.first(), b.last()));
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-10 * (4.0 * PI).powi(2));
        }
    }

    #[test]
    fn window_too_small_errors() {
        let mesh = Mesh::uniform(0.0, 1.0, 2).unwrap();
        let u = sample(&polynomial(&[1.0]).unwrap(), 0, &mesh).unwrap();
        assert!(first_difference(Forward, &u).is_ok());
        assert!(matches!(
            first_difference(Central, &u),
            Err(Error::WindowTooSmall { .. })
        ));
        let mesh4 = Mesh::uniform(0.0, 1.0, 4).unwrap();
        let u4 = sample(&polynomial(&[1.0]).unwrap(), 0, &mesh4).unwrap();
        assert!(matches!(
            second_difference(SecondDiffSpec::new(Central, Central), &u4),
            Err(Error::WindowTooSmall {
                needed: 5,
                available: 4,
                ..
            })
        ));
        assert!(d2_corrected(&u).is_err());
    }

    #[test]
    fn closed_forms_match_composition() {
        let mesh = Mesh::from_points(vec![0.0, 0.07, 0.2, 0.26, 0.5, 0.57, 0.81, 1.0]).unwrap();
        let u = sample(&sinusoid(-1.0, 4.0 * PI, 0.0), 0, &mesh).unwrap();
        for spec in SecondDiffSpec::all() {
            let composed = second_difference(spec, &u).unwrap();
            let closed = closed::evaluate(spec, &u).unwrap();
            assert_eq!(
                (composed.first(), composed.last()),
                (closed.first(), closed.last())
            );
            for (a, b) in composed.values().iter().zip(closed.values()) {
                assert!((a - b).abs() <= 1e-11 * 2000.0, "{spec}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn operator_names() {
        assert_eq!(
            "d+ d-".parse::<Scheme>().unwrap(),
            Scheme::Second(SecondDiffSpec::new(Forward, Backward))
        );
        assert_eq!("c".parse::<Scheme>().unwrap(), Scheme::First(Central));
        assert_eq!(" d2 ".parse::<Scheme>().unwrap(), Scheme::Corrected);
        assert!("d+ d- c".parse::<Scheme>().is_err());
        assert!("x".parse::<Scheme>().is_err());
        match "d+  q".parse::<Scheme>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        for spec in SecondDiffSpec::all() {
            assert_eq!(spec.to_string().parse::<SecondDiffSpec>().unwrap(), spec);
        }
        assert_eq!(SecondDiffSpec::all().count(), 9);
    }
}
