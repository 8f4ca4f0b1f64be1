//! Scaled local differences and the scaled global error indicator.
//!
//! For a reference `f` and an approximation `g` on a common index window,
//! `sld_k = (f_k - g_k) / a` with `a = max |f_k|`, and `sgei = max |sld_k|`.
//! The sign of `sld_k` records the direction of the error: positive where the
//! approximation undershoots.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;

/// sgei at or above which an approximation is rejected.
pub const DEFAULT_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SldSeries {
    /// First mesh index of the common window.
    pub first: usize,
    /// Mesh abscissae of the window.
    pub t: Vec<f64>,
    pub reference: Vec<f64>,
    pub approx: Vec<f64>,
    pub sld: Vec<f64>,
    pub scale: f64,
    pub sgei: f64,
    /// Mesh index where `|sld|` is largest (first occurrence).
    pub argmax: usize,
}

impl SldSeries {
    pub fn last(&self) -> usize {
        self.first + self.sld.len() - 1
    }

    pub fn argmax_t(&self) -> f64 {
        self.t[self.argmax - self.first]
    }

    pub fn verdict(&self) -> Verdict {
        classify(self.sgei, DEFAULT_THRESHOLD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Acceptable,
    Unacceptable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Acceptable => "acceptable",
            Self::Unacceptable => "unacceptable",
        })
    }
}

/// `Unacceptable` iff `sgei >= threshold`.
pub fn classify(sgei: f64, threshold: f64) -> Verdict {
    if sgei >= threshold {
        Verdict::Unacceptable
    } else {
        Verdict::Acceptable
    }
}

fn overlap(reference: &GridFunction<'_>, approx: &GridFunction<'_>) -> Result<(usize, usize)> {
    if !reference.same_mesh(approx) {
        return Err(Error::MeshMismatch);
    }
    let lo = reference.first().max(approx.first());
    let hi = reference.last().min(approx.last());
    if lo > hi {
        return Err(Error::DisjointWindows {
            a_lo: reference.first(),
            a_hi: reference.last(),
            b_lo: approx.first(),
            b_hi: approx.last(),
        });
    }
    Ok((lo, hi))
}

/// sld and sgei over the intersection of the two windows, scaled by the
/// largest |reference| on that intersection.
pub fn scaled_local_difference(
    reference: &GridFunction<'_>,
    approx: &GridFunction<'_>,
) -> Result<SldSeries> {
    let (lo, hi) = overlap(reference, approx)?;
    let scale = (lo..=hi)
        .filter_map(|k| reference.at(k))
        .map(f64::abs)
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroScale);
    }
    build(reference, approx, lo, hi, scale)
}

/// Same as [`scaled_local_difference`] with a caller-chosen scale `a`, e.g.
/// the supremum of the exact function over the whole interval.
pub fn scaled_local_difference_with_scale(
    reference: &GridFunction<'_>,
    approx: &GridFunction<'_>,
    scale: f64,
) -> Result<SldSeries> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(
            "scale",
            format!("must be positive and finite, got {scale}"),
        ));
    }
    let (lo, hi) = overlap(reference, approx)?;
    build(reference, approx, lo, hi, scale)
}

fn build(
    reference: &GridFunction<'_>,
    approx: &GridFunction<'_>,
    lo: usize,
    hi: usize,
    scale: f64,
) -> Result<SldSeries> {
    let mesh = reference.mesh();
    let n = hi - lo + 1;
    let mut series = SldSeries {
        first: lo,
        t: Vec::with_capacity(n),
        reference: Vec::with_capacity(n),
        approx: Vec::with_capacity(n),
        sld: Vec::with_capacity(n),
        scale,
        sgei: 0.0,
        argmax: lo,
    };
    for k in lo..=hi {
        let f = reference.at(k).expect("inside overlap");
        let g = approx.at(k).expect("inside overlap");
        let sld = (f - g) / scale;
        if sld.abs() > series.sgei {
            series.sgei = sld.abs();
            series.argmax = k;
        }
        series.t.push(mesh.point(k));
        series.reference.push(f);
        series.approx.push(g);
        series.sld.push(sld);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use proptest::prelude::*;

    #[test]
    fn identical_functions_have_zero_sgei() {
        let mesh = Mesh::uniform(0.0, 1.0, 4).unwrap();
        let f = GridFunction::new(&mesh, 0, vec![1.0, -2.0, 0.5, 0.0]).unwrap();
        let s = scaled_local_difference(&f, &f).unwrap();
        assert_eq!(s.sgei, 0.0);
        assert!(s.sld.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn two_point_arithmetic() {
        let mesh = Mesh::uniform(0.0, 1.0, 2).unwrap();
        let f = GridFunction::new(&mesh, 0, vec![2.0, 1.0]).unwrap();
        let g = GridFunction::new(&mesh, 0, vec![1.0, 2.0]).unwrap();
        let s = scaled_local_difference(&f, &g).unwrap();
        assert_eq!(s.scale, 2.0);
        assert_eq!(s.sld, vec![0.5, -0.5]);
        assert_eq!(s.sgei, 0.5);
        assert_eq!(s.argmax, 0);
    }

    #[test]
    fn uses_overlap_only() {
        let mesh = Mesh::uniform(0.0, 1.0, 5).unwrap();
        let f = GridFunction::new(&mesh, 0, vec![10.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let g = GridFunction::new(&mesh, 1, vec![0.0, 2.0, 2.0]).unwrap();
        let s = scaled_local_difference(&f, &g).unwrap();
        assert_eq!((s.first, s.last()), (1, 3));
        assert_eq!(s.scale, 2.0);
        assert_eq!(s.sgei, 0.5);
    }

    #[test]
    fn error_cases() {
        let mesh = Mesh::uniform(0.0, 1.0, 5).unwrap();
        let zero = GridFunction::new(&mesh, 0, vec![0.0; 5]).unwrap();
        let g = GridFunction::new(&mesh, 0, vec![1.0; 5]).unwrap();
        assert!(matches!(
            scaled_local_difference(&zero, &g),
            Err(Error::ZeroScale)
        ));
        let left = GridFunction::new(&mesh, 0, vec![1.0, 1.0]).unwrap();
        let right = GridFunction::new(&mesh, 3, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            scaled_local_difference(&left, &right),
            Err(Error::DisjointWindows { .. })
        ));
        let other = Mesh::uniform(0.0, 2.0, 5).unwrap();
        let h = GridFunction::new(&other, 0, vec![1.0; 5]).unwrap();
        assert!(matches!(
            scaled_local_difference(&g, &h),
            Err(Error::MeshMismatch)
        ));
        assert!(scaled_local_difference_with_scale(&g, &g, 0.0).is_err());
    }

    #[test]
    fn verdicts() {
        assert_eq!(classify(2.5487, DEFAULT_THRESHOLD), Verdict::Unacceptable);
        assert_eq!(classify(0.0535, DEFAULT_THRESHOLD), Verdict::Acceptable);
        assert_eq!(classify(1.0, DEFAULT_THRESHOLD), Verdict::Unacceptable);
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn scale_equivariance((f, g) in pair(), c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]) {
            prop_assume!(f.iter().any(|v| v.abs() > 1e-3));
            let mesh = Mesh::uniform(0.0, 1.0, f.len()).unwrap();
            let rf = GridFunction::new(&mesh, 0, f.clone()).unwrap();
            let ag = GridFunction::new(&mesh, 0, g.clone()).unwrap();
            let sf = GridFunction::new(&mesh, 0, f.iter().map(|v| c * v).collect()).unwrap();
            let sg = GridFunction::new(&mesh, 0, g.iter().map(|v| c * v).collect()).unwrap();
            let a = scaled_local_difference(&rf, &ag).unwrap();
            let b = scaled_local_difference(&sf, &sg).unwrap();
            let tol = 2.0 * f64::EPSILON * a.sld.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.sld.iter().zip(&b.sld) {
                // sign of c cancels between numerator and |scale|
                prop_assert!((x * c.signum() - y).abs() <= tol * 4.0);
            }
        }

        #[test]
        fn sld_sign_and_sgei((f, g) in pair()) {
            prop_assume!(f.iter().any(|v| v.abs() > 1e-3));
            let mesh = Mesh::uniform(0.0, 1.0, f.len()).unwrap();
            let rf = GridFunction::new(&mesh, 0, f.clone()).unwrap();
            let ag = GridFunction::new(&mesh, 0, g.clone()).unwrap();
            let s = scaled_local_difference(&rf, &ag).unwrap();
            prop_assert!(s.scale > 0.0);
            prop_assert_eq!(s.sgei, s.sld.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            for (i, v) in s.sld.iter().enumerate() {
                prop_assert_eq!(*v > 0.0, f[i] > g[i]);
            }
            // swapping roles negates sld when both sides share the same max
            if f.iter().fold(0.0f64, |m, v| m.max(v.abs())) == g.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
                let t = scaled_local_difference(&ag, &rf).unwrap();
                for (x, y) in s.sld.iter().zip(&t.sld) {
                    prop_assert_eq!(*x, -*y);
                }
            }
        }

        #[test]
        fn restriction_never_increases_sgei((f, g) in pair(), cut in 0usize..4) {
            prop_assume!(f.len() > cut + 1);
            let mesh = Mesh::uniform(0.0, 1.0, f.len()).unwrap();
            let rf = GridFunction::new(&mesh, 0, f.clone()).unwrap();
            let ag = GridFunction::new(&mesh, 0, g.clone()).unwrap();
            let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assume!(scale > 0.0);
            let full = scaled_local_difference_with_scale(&rf, &ag, scale).unwrap();
            let sub = ag.restrict(cut, f.len() - 1).unwrap();
            let part = scaled_local_difference_with_scale(&rf, &sub, scale).unwrap();
            prop_assert!(part.sgei <= full.sgei);
        }
    }
}
