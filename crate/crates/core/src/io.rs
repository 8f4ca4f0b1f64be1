//! CSV output. Floats are written with 17 significant digits so that every
//! value reads back bit-for-bit; summaries go in trailing `#` comment lines.

use std::io::{BufRead, Write};

use crate::analysis::OrderEstimate;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::ivp::IvpSolution;
use crate::mesh::Mesh;
use crate::metrics::SldSeries;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_mesh_csv(mesh: &Mesh, out: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(out, "k,t,h")?;
    for (k, &t) in mesh.points().iter().enumerate() {
        match mesh.steps().get(k) {
            Some(&h) => writeln!(out, "{k},{},{}", fmt_f64(t), fmt_f64(h))?,
            None => writeln!(out, "{k},{},", fmt_f64(t))?,
        }
    }
    Ok(())
}

/// Reads the `k,t,h` format back. Only the `t` column is used to rebuild the
/// mesh; `k` must count up from zero.
pub fn read_mesh_csv(input: impl BufRead) -> Result<Mesh> {
    let mut points = Vec::new();
    let mut saw_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !saw_header {
            if trimmed != "k,t,h" {
                return Err(Error::Csv {
                    line: lineno,
                    message: format!("expected header 'k,t,h', got '{trimmed}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Csv {
                line: lineno,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let k: usize = fields[0].parse().map_err(|_| Error::Csv {
            line: lineno,
            message: format!("bad index '{}'", fields[0]),
        })?;
        if k != points.len() {
            return Err(Error::Csv {
                line: lineno,
                message: format!("expected index {}, got {k}", points.len()),
            });
        }
        let t: f64 = fields[1].parse().map_err(|_| Error::Csv {
            line: lineno,
            message: format!("bad abscissa '{}'", fields[1]),
        })?;
        points.push(t);
    }
    if !saw_header {
        return Err(Error::Csv {
            line: 1,
            message: "empty input".into(),
        });
    }
    Mesh::from_points(points)
}

pub fn write_grid_csv(u: &GridFunction<'_>, out: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(out, "k,t,value")?;
    for (k, t, v) in u.iter() {
        writeln!(out, "{k},{},{}", fmt_f64(t), fmt_f64(v))?;
    }
    Ok(())
}

/// `sgei=..,argmax_t=..,verdict=..`
pub fn sld_summary(series: &SldSeries) -> String {
    format!(
        "sgei={},argmax_t={},verdict={}",
        fmt_f64(series.sgei),
        fmt_f64(series.argmax_t()),
        series.verdict()
    )
}

pub fn write_sld_csv(series: &SldSeries, out: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(out, "k,t,reference,approx,sld")?;
    for i in 0..series.sld.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            series.first + i,
            fmt_f64(series.t[i]),
            fmt_f64(series.reference[i]),
            fmt_f64(series.approx[i]),
            fmt_f64(series.sld[i])
        )?;
    }
    writeln!(out, "# {}", sld_summary(series))?;
    Ok(())
}

pub fn write_order_csv(estimate: &OrderEstimate, out: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(out, "h_max,sgei")?;
    for &(h, s) in &estimate.samples {
        writeln!(out, "{},{}", fmt_f64(h), fmt_f64(s))?;
    }
    writeln!(
        out,
        "# slope={},intercept={},excluded_coarsest={}",
        fmt_f64(estimate.slope),
        fmt_f64(estimate.intercept),
        estimate.excluded_coarsest
    )?;
    Ok(())
}

pub fn write_ivp_csv(solution: &IvpSolution<'_>, out: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(out, "k,t,w,exact,sld")?;
    for (i, (k, t, w)) in solution.w.iter().enumerate() {
        writeln!(
            out,
            "{k},{},{},{},{}",
            fmt_f64(t),
            fmt_f64(w),
            fmt_f64(solution.exact.values()[i]),
            fmt_f64(solution.sld.sld[i])
        )?;
    }
    writeln!(out, "# {}", sld_summary(&solution.sld))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_round_trip_is_exact() {
        let mesh = Mesh::geometric(0.0, 0.1, 50.0 / 59.0, 40).unwrap();
        let mut buf = Vec::new();
        write_mesh_csv(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,t,h\n"));
        assert!(text.lines().last().unwrap().ends_with(','));
        let back = read_mesh_csv(text.as_bytes()).unwrap();
        assert_eq!(back.points(), mesh.points());
    }

    #[test]
    fn mesh_csv_errors_carry_lines() {
        let err = read_mesh_csv("k,t,h\n0,0.0,0.5\n2,1.0,\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }));
        assert!(read_mesh_csv("x,y\n".as_bytes()).is_err());
        assert!(read_mesh_csv("".as_bytes()).is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
