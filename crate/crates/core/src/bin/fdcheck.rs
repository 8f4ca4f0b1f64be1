use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fdcheck::analysis;
use fdcheck::diffops::{Scheme, SecondDiffSpec};
use fdcheck::experiments::{self, Preset, ScaleMode};
use fdcheck::functions;
use fdcheck::io as csv;
use fdcheck::ivp::{IvpOperator, IvpProblem};
use fdcheck::mesh::DEFAULT_INSERT_BETA;
use fdcheck::{parse, Mesh};

#[derive(Parser)]
#[command(
    name = "fdcheck",
    version,
    about = "Finite differences on nonuniform meshes"
)]
struct Cli {
    /// Write results into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Insertion parameter for `+insert` refinement, in (0, 1).
    #[arg(long, global = true, default_value_t = DEFAULT_INSERT_BETA)]
    beta: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the points and steps of a mesh.
    Mesh {
        /// e.g. `uniform:0,1,23` or `equiarc:0,1,12+insert:0.7`
        spec: String,
    },
    /// Apply a difference operator to a function and compare with its exact derivative.
    Diff {
        #[arg(long)]
        mesh: String,
        /// e.g. `sinusoid:amplitude=-1,frequency=4pi`
        #[arg(long)]
        function: String,
        /// `d+`, `d-`, `c`, a pair such as `d+ d-` (outer first), or `d2`
        #[arg(long)]
        operator: String,
        /// Derivative order to compare against; defaults to the operator's.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "sampled")]
        scale: String,
    },
    /// Consistency coefficients of a composed second difference.
    Consistency {
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        operator: String,
        /// Single mesh index; every admissible index when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Empirical order of accuracy over a mesh family, coarsest first.
    Order {
        #[arg(long = "mesh", required = true)]
        meshes: Vec<String>,
        #[arg(long)]
        function: String,
        #[arg(long)]
        operator: String,
    },
    /// March the oscillator equation and compare with the exact solution.
    Oscillator {
        #[arg(long, default_value = "4pi^2")]
        kappa: String,
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value = "d- d+")]
        operator: String,
        #[arg(long, default_value = "1")]
        value: String,
        #[arg(long, default_value = "-1")]
        slope: String,
    },
    /// Run a canned experiment (`ex5_1` .. `ex5_5`, `fig5_1`, or `all`).
    Preset { name: String },
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                let file =
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                body(&mut w)?;
                w.flush()?;
                Ok(())
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                body(&mut w)?;
                w.flush()?;
                Ok(())
            }
        }
    }
}

fn json_out(w: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn number(text: &str) -> Result<f64> {
    Ok(parse::number(text, 0)?)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let out = Output {
        dir: cli.out.clone(),
    };
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let beta = cli.beta;

    match cli.command {
        Command::Mesh { spec } => {
            let mesh = parse::mesh(&spec, beta)?;
            out.emit(&format!("mesh.{ext}"), |w| match cli.format {
                Format::Csv => Ok(csv::write_mesh_csv(&mesh, w)?),
                Format::Json => json_out(
                    w,
                    &json!({
                        "schema_version": experiments::SCHEMA_VERSION,
                        "points": mesh.points(),
                        "steps": mesh.steps(),
                        "ratios": mesh.smoothness_ratios().unwrap_or_default(),
                        "uniform": mesh.is_uniform(),
                    }),
                ),
            })
        }
        Command::Diff {
            mesh,
            function,
            operator,
            order,
            scale,
        } => {
            let mesh = parse::mesh(&mesh, beta)?;
            let f = functions::from_label(&function)?;
            let scheme: Scheme = operator.parse()?;
            let scale: ScaleMode = scale.parse()?;
            let series = experiments::run_custom(&mesh, &f, scheme, order, scale)?;
            out.emit(&format!("diff.{ext}"), |w| match cli.format {
                Format::Csv => Ok(csv::write_sld_csv(&series, w)?),
                Format::Json => json_out(
                    w,
                    &json!({
                        "schema_version": experiments::SCHEMA_VERSION,
                        "operator": scheme.to_string(),
                        "function": f.label(),
                        "sgei": series.sgei,
                        "argmax_t": series.argmax_t(),
                        "scale": series.scale,
                        "classification": series.verdict(),
                        "t": series.t,
                        "sld": series.sld,
                    }),
                ),
            })
        }
        Command::Consistency { mesh, operator, k } => {
            let mesh = parse::mesh(&mesh, beta)?;
            let spec: SecondDiffSpec = operator.parse()?;
            let indices: Vec<usize> = match k {
                Some(k) => vec![k],
                None => {
                    let (left, right) = spec.reach();
                    (left..mesh.len().saturating_sub(right)).collect()
                }
            };
            let reports = indices
                .into_iter()
                .map(|k| analysis::consistency_report(spec, &mesh, k))
                .collect::<fdcheck::Result<Vec<_>>>()?;
            out.emit(&format!("consistency.{ext}"), |w| match cli.format {
                Format::Json => json_out(w, &serde_json::to_value(&reports)?),
                Format::Csv => {
                    writeln!(
                        w,
                        "k,leading_coefficient,fppp_coefficient,consistent,bracket_lo,bracket_hi"
                    )?;
                    for r in &reports {
                        writeln!(
                            w,
                            "{},{},{},{},{},{}",
                            r.index.unwrap_or_default(),
                            csv::fmt_f64(r.leading_coefficient),
                            csv::fmt_f64(r.fppp_coefficient),
                            r.consistent,
                            csv::fmt_f64(r.remainder_bracket[0]),
                            csv::fmt_f64(r.remainder_bracket[1]),
                        )?;
                    }
                    Ok(())
                }
            })
        }
        Command::Order {
            meshes,
            function,
            operator,
        } => {
            let family = meshes
                .iter()
                .map(|m| parse::mesh(m, beta))
                .collect::<fdcheck::Result<Vec<Mesh>>>()?;
            let f = functions::from_label(&function)?;
            let scheme: Scheme = operator.parse()?;
            let estimate = analysis::empirical_order(scheme, &f, &family)?;
            out.emit(&format!("order.{ext}"), |w| match cli.format {
                Format::Csv => Ok(csv::write_order_csv(&estimate, w)?),
                Format::Json => json_out(w, &serde_json::to_value(&estimate)?),
            })
        }
        Command::Oscillator {
            kappa,
            mesh,
            operator,
            value,
            slope,
        } => {
            let mesh = parse::mesh(&mesh, beta)?;
            let op: IvpOperator = operator.parse()?;
            let problem =
                IvpProblem::new(number(&kappa)?, mesh, op, number(&value)?, number(&slope)?)?;
            let solution = problem.solve()?;
            out.emit(&format!("oscillator.{ext}"), |w| match cli.format {
                Format::Csv => Ok(csv::write_ivp_csv(&solution, w)?),
                Format::Json => json_out(
                    w,
                    &json!({
                        "schema_version": experiments::SCHEMA_VERSION,
                        "operator": op.to_string(),
                        "sgei": solution.sld.sgei,
                        "argmax_t": solution.sld.argmax_t(),
                        "classification": solution.sld.verdict(),
                        "t": solution.sld.t,
                        "w": solution.w.values(),
                        "exact": solution.exact.values(),
                    }),
                ),
            })
        }
        Command::Preset { name } => {
            let presets = if name == "all" {
                Preset::ALL.to_vec()
            } else {
                vec![name.parse::<Preset>()?]
            };
            for preset in presets {
                let report = experiments::run_preset(preset, beta, cli.out.as_deref())?;
                if cli.out.is_none() {
                    out.emit("", |w| json_out(w, &report.summary))?;
                }
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
