//! Forward marching for the oscillator difference equation
//! `L(w)(t_k) = -kappa w_k`, with `w_0` given and `w_1` from a forward
//! difference of the initial slope.

use std::fmt;
use std::str::FromStr;

use crate::analysis;
use crate::diffops::{FirstDiffKind, SecondDiffSpec};
use crate::error::{invalid, Error, Result};
use crate::functions;
use crate::grid::GridFunction;
use crate::mesh::Mesh;
use crate::metrics::{self, SldSeries};

/// Second-difference operator used by the marching scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IvpOperator {
    /// Backward difference of forward differences.
    BackwardForward,
    /// `(D+ - D-) / ((h_{k-1} + h_k) / 2)`.
    Corrected,
}

impl IvpOperator {
    pub const BACKWARD_FORWARD: SecondDiffSpec =
        SecondDiffSpec::new(FirstDiffKind::Backward, FirstDiffKind::Forward);
}

impl fmt::Display for IvpOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BackwardForward => write!(f, "{}", Self::BACKWARD_FORWARD),
            Self::Corrected => f.write_str("d2"),
        }
    }
}

impl FromStr for IvpOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        match tokens.as_slice() {
            ["d2"] => Ok(Self::Corrected),
            ["d-", "d+"] => Ok(Self::BackwardForward),
            _ => Err(invalid(
                "operator",
                format!("expected 'd- d+' or 'd2', got '{s}'"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IvpProblem {
    pub kappa: f64,
    pub mesh: Mesh,
    pub operator: IvpOperator,
    pub initial_value: f64,
    pub initial_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IvpSolution<'m> {
    pub w: GridFunction<'m>,
    pub exact: GridFunction<'m>,
    pub sld: SldSeries,
}

impl IvpProblem {
    pub fn new(
        kappa: f64,
        mesh: Mesh,
        operator: IvpOperator,
        initial_value: f64,
        initial_slope: f64,
    ) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", format!("must be positive, got {kappa}")));
        }
        if mesh.len() < 3 {
            return Err(Error::InvalidMesh(format!(
                "marching needs at least 3 points, got {}",
                mesh.len()
            )));
        }
        if !initial_value.is_finite() || !initial_slope.is_finite() {
            return Err(invalid("initial data", "must be finite"));
        }
        Ok(Self {
            kappa,
            mesh,
            operator,
            initial_value,
            initial_slope,
        })
    }

    /// Marched values at every mesh point.
    pub fn march(&self) -> Vec<f64> {
        let h = self.mesh.steps();
        let kappa = self.kappa;
        let mut w = Vec::with_capacity(self.mesh.len());
        w.push(self.initial_value);
        w.push(self.initial_value + h[0] * self.initial_slope);
        for k in 1..h.len() {
            let (hm, hk) = (h[k - 1], h[k]);
            let (wm, wk) = (w[k - 1], w[k]);
            let next = match self.operator {
                IvpOperator::BackwardForward => {
                    ((hk + hm) * wk - hk * wm - kappa * wk * hk * hm * hm) / hm
                }
                IvpOperator::Corrected => wk + hk * ((wk - wm) / hm - kappa * wk * (hk + hm) / 2.0),
            };
            w.push(next);
        }
        w
    }

    /// Marches and compares with the exact solution, scaled by its largest
    /// magnitude over the mesh.
    pub fn solve(&self) -> Result<IvpSolution<'_>> {
        let w = GridFunction::new(&self.mesh, 0, self.march())?;
        let phi = functions::oscillator(
            self.kappa,
            self.mesh.start(),
            self.initial_value,
            self.initial_slope,
        )?;
        let exact = functions::sample(&phi, 0, &self.mesh)?;
        let sld = metrics::scaled_local_difference(&exact, &w)?;
        Ok(IvpSolution { w, exact, sld })
    }

    /// `(h_k + h_{k-1}) / (2 h_{k-1})`: the multiple of `psi''` the
    /// backward-forward scheme actually discretises at interior index `k`.
    pub fn effective_equation_factor(&self, k: usize) -> Result<f64> {
        if self.operator != IvpOperator::BackwardForward {
            return Err(invalid("operator", "factor is defined for 'd- d+' only"));
        }
        Ok(
            analysis::consistency_report(IvpOperator::BACKWARD_FORWARD, &self.mesh, k)?
                .leading_coefficient,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const KAPPA: f64 = 4.0 * PI * PI;

    fn problem(mesh: Mesh, operator: IvpOperator) -> IvpProblem {
        IvpProblem::new(KAPPA, mesh, operator, 1.0, -1.0).unwrap()
    }

    #[test]
    fn operator_names() {
        assert_eq!(
            "d- d+".parse::<IvpOperator>().unwrap(),
            IvpOperator::BackwardForward
        );
        assert_eq!("d2".parse::<IvpOperator>().unwrap(), IvpOperator::Corrected);
        assert!("d+ d-".parse::<IvpOperator>().is_err());
        assert_eq!(IvpOperator::BackwardForward.to_string(), "d- d+");
    }

    #[test]
    fn validation() {
        let mesh = Mesh::uniform(0.0, 1.0, 5).unwrap();
        assert!(IvpProblem::new(0.0, mesh.clone(), IvpOperator::Corrected, 1.0, 0.0).is_err());
        let short = Mesh::uniform(0.0, 1.0, 2).unwrap();
        assert!(IvpProblem::new(1.0, short, IvpOperator::Corrected, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        for op in [IvpOperator::BackwardForward, IvpOperator::Corrected] {
            let mesh = Mesh::geometric(0.0, 0.1, 50.0 / 59.0, 200).unwrap();
            let p = IvpProblem::new(KAPPA, mesh, op, 0.0, 0.0).unwrap();
            assert!(p.march().iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn uniform_recurrence() {
        let mesh = Mesh::uniform(0.0, 59.0 / 90.0, 11).unwrap();
        let h = mesh.step(0);
        for op in [IvpOperator::BackwardForward, IvpOperator::Corrected] {
            let w = problem(mesh.clone(), op).march();
            for k in 1..w.len() - 1 {
                let expected = (2.0 - KAPPA * h * h) * w[k] - w[k - 1];
                assert!(
                    (w[k + 1] - expected).abs()
                        <= 8.0 * f64::EPSILON * (w[k].abs() + w[k - 1].abs())
                );
            }
        }
    }

    #[test]
    fn effective_factor() {
        let r = 50.0 / 59.0;
        let p = problem(
            Mesh::geometric(0.0, 0.1, r, 200).unwrap(),
            IvpOperator::BackwardForward,
        );
        for k in [1, 7, 100, 200] {
            assert!((p.effective_equation_factor(k).unwrap() - 109.0 / 118.0).abs() < 1e-12);
        }
        assert!(p.effective_equation_factor(0).is_err());
        let p2 = problem(
            Mesh::geometric(0.0, 0.1, 2.0, 6).unwrap(),
            IvpOperator::BackwardForward,
        );
        assert!((p2.effective_equation_factor(3).unwrap() - 1.5).abs() < 1e-12);
        let pu = problem(
            Mesh::uniform(0.0, 1.0, 9).unwrap(),
            IvpOperator::BackwardForward,
        );
        assert_eq!(pu.effective_equation_factor(4).unwrap(), 1.0);
        let pc = problem(Mesh::uniform(0.0, 1.0, 9).unwrap(), IvpOperator::Corrected);
        assert!(pc.effective_equation_factor(4).is_err());
    }

    #[test]
    fn uniform_example() {
        let mesh = Mesh::uniform(0.0, 59.0 / 90.0, 11).unwrap();
        let p = problem(mesh, IvpOperator::BackwardForward);
        let s = p.solve().unwrap();
        assert!((s.sld.sgei - 0.1945).abs() < 0.02, "{}", s.sld.sgei);
        assert!((s.sld.argmax_t() - 0.2622).abs() <= 59.0 / 900.0 + 1e-12);
        assert_eq!(s.w.len(), 11);
    }

    #[test]
    fn halving_steps_reduces_sgei() {
        let b = 59.0 / 90.0;
        let sgei: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| {
                let mesh = Mesh::uniform(0.0, b, n + 1).unwrap();
                problem(mesh, IvpOperator::BackwardForward)
                    .solve()
                    .unwrap()
                    .sld
                    .sgei
            })
            .collect();
        assert!(sgei[1] < sgei[0] && sgei[2] < sgei[1], "{sgei:?}");
    }
}
