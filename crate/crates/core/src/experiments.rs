//! Canned experiments on the two reference meshes and the oscillator problem.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};

use crate::diffops::{FirstDiffKind, Scheme, SecondDiffSpec};
use crate::error::{invalid, Error, Result};
use crate::functions::{self, AnalyticFunction};
use crate::io;
use crate::ivp::{IvpOperator, IvpProblem, IvpSolution};
use crate::mesh::{Mesh, DEFAULT_QUAD_RESOLUTION};
use crate::metrics::{self, SldSeries};
use crate::parse;

pub const SCHEMA_VERSION: u32 = 1;

/// Samples used when the sld scale is the supremum of the exact derivative.
pub const SUP_SCALE_SAMPLES: usize = 10_001;

/// Points of the reference uniform mesh on `[0, 1]`.
pub const UNIFORM_POINTS: usize = 23;

/// Points of the equi-arclength mesh before refinement.
pub const ARCLENGTH_POINTS: usize = 12;

/// How the sld scale `a` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    /// Largest |reference| over the compared window.
    #[default]
    Sampled,
    /// Supremum of the exact derivative over the whole mesh interval.
    Sup,
}

impl FromStr for ScaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(Self::Sampled),
            "sup" => Ok(Self::Sup),
            _ => Err(invalid(
                "scale",
                format!("expected 'sampled' or 'sup', got '{s}'"),
            )),
        }
    }
}

/// `-sin(4 pi t)`, the test function of the difference-operator presets.
pub fn test_function() -> AnalyticFunction {
    functions::sinusoid(-1.0, 4.0 * PI, 0.0)
}

/// The uniform 23-point mesh on `[0, 1]` and the equi-arclength mesh of
/// `sin(2 pi t)` with 12 points, refined once with `beta`.
pub fn reference_meshes(beta: f64) -> Result<(Mesh, Mesh)> {
    let uniform = Mesh::uniform(0.0, 1.0, UNIFORM_POINTS)?;
    let arc = Mesh::equiarclength(
        &parse::default_arclength_curve(),
        0.0,
        1.0,
        ARCLENGTH_POINTS,
        DEFAULT_QUAD_RESOLUTION,
    )?;
    Ok((uniform, arc.refine_insert(beta)?))
}

/// Applies `scheme` to samples of `f` and compares with the exact derivative
/// of `order` (the scheme's own order when `None`).
pub fn run_custom(
    mesh: &Mesh,
    f: &AnalyticFunction,
    scheme: Scheme,
    order: Option<usize>,
    scale: ScaleMode,
) -> Result<SldSeries> {
    let order = order.unwrap_or(scheme.derivative_order());
    if order > functions::MAX_ORDER {
        return Err(invalid(
            "order",
            format!("at most {} supported, got {order}", functions::MAX_ORDER),
        ));
    }
    let u = functions::sample(f, 0, mesh)?;
    let approx = scheme.apply(&u)?;
    let exact = functions::sample(f, order, mesh)?;
    match scale {
        ScaleMode::Sampled => metrics::scaled_local_difference(&exact, &approx),
        ScaleMode::Sup => {
            let a = f.sampled_sup(order, mesh.start(), mesh.end(), SUP_SCALE_SAMPLES);
            metrics::scaled_local_difference_with_scale(&exact, &approx, a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Ex5_1,
    Ex5_2,
    Ex5_3,
    Ex5_4,
    Ex5_5,
    Fig5_1,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Self::Ex5_1,
        Self::Ex5_2,
        Self::Ex5_3,
        Self::Ex5_4,
        Self::Ex5_5,
        Self::Fig5_1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ex5_1 => "ex5_1",
            Self::Ex5_2 => "ex5_2",
            Self::Ex5_3 => "ex5_3",
            Self::Ex5_4 => "ex5_4",
            Self::Ex5_5 => "ex5_5",
            Self::Fig5_1 => "fig5_1",
        }
    }

    /// Operator compared against the test function, for the four
    /// difference-operator presets.
    pub fn scheme(self) -> Option<Scheme> {
        use FirstDiffKind::*;
        match self {
            Self::Ex5_1 => Some(Scheme::First(Central)),
            Self::Ex5_2 => Some(Scheme::Second(SecondDiffSpec::new(Forward, Forward))),
            Self::Ex5_3 => Some(Scheme::Second(SecondDiffSpec::new(Central, Backward))),
            Self::Ex5_4 => Some(Scheme::Second(SecondDiffSpec::new(Central, Central))),
            Self::Ex5_5 | Self::Fig5_1 => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid("preset", format!("unknown preset '{s}'")))
    }
}

/// Summary plus the files written, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetReport {
    pub summary: Value,
    pub files: Vec<PathBuf>,
}

struct Sink<'a> {
    dir: Option<&'a Path>,
    files: Vec<PathBuf>,
}

impl Sink<'_> {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let Some(dir) = self.dir else { return Ok(()) };
        let path = dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        body(&mut out)?;
        out.flush()?;
        self.files.push(path);
        Ok(())
    }
}

fn sld_json(s: &SldSeries) -> Value {
    json!({
        "sgei": s.sgei,
        "argmax_t": s.argmax_t(),
        "scale": s.scale,
        "classification": s.verdict(),
    })
}

fn ivp_json(s: &IvpSolution<'_>) -> Value {
    json!({
        "sgei": s.sld.sgei,
        "argmax_t": s.sld.argmax_t(),
        "argmax_k": s.sld.argmax,
        "last_k": s.sld.last(),
        "sld_at_end": s.sld.sld[s.sld.sld.len() - 1],
        "classification": s.sld.verdict(),
    })
}

/// Runs one preset. With `out` set, CSVs and `<name>_summary.json` are
/// written into that directory.
pub fn run_preset(preset: Preset, beta: f64, out: Option<&Path>) -> Result<PresetReport> {
    let mut sink = Sink {
        dir: out,
        files: Vec::new(),
    };
    let name = preset.name();
    let mut summary = json!({ "schema_version": SCHEMA_VERSION, "preset": name });

    match preset {
        Preset::Fig5_1 => {
            let (uniform, nonuniform) = reference_meshes(beta)?;
            for (label, mesh) in [("uniform", &uniform), ("nonuniform", &nonuniform)] {
                sink.write(&format!("{name}_{label}_mesh.csv"), |w| {
                    io::write_mesh_csv(mesh, w)
                })?;
                summary[format!("steps_{label}")] = json!(mesh.steps());
                summary[format!("ratios_{label}")] = json!(mesh.smoothness_ratios()?);
            }
            summary["beta"] = json!(beta);
        }
        Preset::Ex5_5 => {
            let kappa = 4.0 * PI * PI;
            let geometric = Mesh::geometric(0.0, 0.1, 50.0 / 59.0, 200)?;
            let b = geometric.end();
            let uniform = Mesh::uniform(0.0, b, 11)?;
            let runs = [
                ("geometric", geometric.clone(), IvpOperator::BackwardForward),
                ("uniform", uniform, IvpOperator::BackwardForward),
                ("geometric_d2", geometric, IvpOperator::Corrected),
            ];
            for (label, mesh, op) in runs {
                let problem = IvpProblem::new(kappa, mesh, op, 1.0, -1.0)?;
                let solution = problem.solve()?;
                sink.write(&format!("{name}_{label}.csv"), |w| {
                    io::write_ivp_csv(&solution, w)
                })?;
                summary[label] = ivp_json(&solution);
                if label == "geometric" {
                    summary["effective_factor"] = json!(problem.effective_equation_factor(1)?);
                }
            }
            summary["kappa"] = json!(kappa);
            summary["b"] = json!(b);
        }
        _ => {
            let scheme = preset.scheme().expect("difference preset");
            let f = test_function();
            let (uniform, nonuniform) = reference_meshes(beta)?;
            for (label, mesh) in [("uniform", &uniform), ("nonuniform", &nonuniform)] {
                let series = run_custom(mesh, &f, scheme, None, ScaleMode::Sup)?;
                sink.write(&format!("{name}_{label}_sld.csv"), |w| {
                    io::write_sld_csv(&series, w)
                })?;
                summary[format!("sgei_{label}")] = json!(series.sgei);
                summary[format!("classification_{label}")] = json!(series.verdict());
                summary[label] = sld_json(&series);
            }
            summary["operator"] = json!(scheme.to_string());
            summary["function"] = json!(f.label());
            summary["beta"] = json!(beta);
        }
    }

    let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    sink.write(&format!("{name}_summary.json"), |w| {
        Ok(writeln!(w, "{text}")?)
    })?;
    Ok(PresetReport {
        summary,
        files: sink.files,
    })
}
