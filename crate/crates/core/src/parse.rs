//! Compact textual descriptors shared by the CLI and the experiment presets.
//!
//! Numbers accept a small grammar so that constants like these can be typed
//! directly: `-1`, `0.25`, `1e-3`, `4pi`, `4pi^2`, `50/59`, `pi/2`.
//!
//! Mesh descriptors:
//!
//! | form                         | meaning                                   |
//! |------------------------------|-------------------------------------------|
//! | `uniform:a,b,n`              | `n` equally spaced points                 |
//! | `geometric:t0,h0,r,m`        | `m + 2` points, steps `h0 r^k`            |
//! | `equiarc:curve,a,b,n`        | equal-arclength points for `curve`        |
//! | `equiarc:a,b,n`              | same, with the curve `sin(2 pi t)`        |
//! | `jitter:a,b,steps,amp,seed`  | seeded randomly perturbed steps           |
//! | `points:t0,t1,...`           | explicit points                           |
//!
//! Any of them may carry one or more `+insert` or `+insert:beta` suffixes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functions::{self, AnalyticFunction};
use crate::mesh::{Mesh, DEFAULT_QUAD_RESOLUTION};

pub(crate) fn error_at(column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        column,
        message: message.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    offset: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.offset + self.pos + 1
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    fn decimal(&mut self) -> Result<Option<f64>> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9' | b'.')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Ok(None);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let digits = self.pos;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or_default();
        text.parse::<f64>().map(Some).map_err(|_| {
            error_at(
                self.offset + start + 1,
                format!("malformed number `{text}`"),
            )
        })
    }

    fn power(&mut self) -> Result<i32> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or_default();
        text.parse::<i32>().map_err(|_| {
            error_at(
                self.offset + start + 1,
                "expected an integer exponent after `^`",
            )
        })
    }

    /// One or more factors multiplied by juxtaposition: `4pi^2`, `0.5`, `pi`.
    fn term(&mut self) -> Result<f64> {
        let mut value = 1.0;
        let mut seen = false;
        loop {
            if let Some(d) = self.decimal()? {
                value *= d.powi(self.power()?);
            } else if self.bytes[self.pos..].starts_with(b"pi") {
                self.pos += 2;
                value *= PI.powi(self.power()?);
            } else {
                break;
            }
            seen = true;
        }
        if seen {
            Ok(value)
        } else {
            Err(error_at(self.column(), "expected a number"))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut value = self.term()?;
        while self.eat(b'/') {
            let col = self.column();
            let divisor = self.term()?;
            if divisor == 0.0 {
                return Err(error_at(col, "division by zero"));
            }
            value /= divisor;
        }
        self.skip_ws();
        Ok(if negative { -value } else { value })
    }
}

/// Parses a whole string as a number. `offset` is the 0-based column of `text`
/// within the original input, used for diagnostics.
pub fn number(text: &str, offset: usize) -> Result<f64> {
    let mut cursor = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
        offset,
    };
    let value = cursor.number()?;
    if cursor.pos != text.len() {
        return Err(error_at(
            cursor.column(),
            format!("unexpected `{}`", &text[cursor.pos..]),
        ));
    }
    Ok(value)
}

/// Comma-separated fields with their 0-based column offsets.
fn fields(text: &str, offset: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == ',' {
            out.push((&text[start..i], offset + start));
            start = i + 1;
        }
    }
    out.push((&text[start..], offset + start));
    out
}

pub fn number_list(text: &str, offset: usize) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(error_at(
            offset + 1,
            "expected a comma-separated list of numbers",
        ));
    }
    fields(text, offset)
        .into_iter()
        .map(|(f, col)| number(f, col))
        .collect()
}

fn count(text: &str, offset: usize) -> Result<usize> {
    let value = number(text, offset)?;
    if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
        return Err(error_at(
            offset + 1,
            format!("expected a non-negative integer, got {value}"),
        ));
    }
    Ok(value as usize)
}

/// Values parsed from a `key=value,...` list.
#[derive(Debug, Default)]
pub struct KeyValues(BTreeMap<String, f64>);

impl KeyValues {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }
}

pub fn key_values(text: &str, offset: usize, allowed: &[&str]) -> Result<KeyValues> {
    let mut map = BTreeMap::new();
    if text.trim().is_empty() {
        return Ok(KeyValues(map));
    }
    for (field, col) in fields(text, offset) {
        let Some((key, value)) = field.split_once('=') else {
            return Err(error_at(
                col + 1,
                format!("expected key=value, got `{field}`"),
            ));
        };
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(error_at(
                col + 1,
                format!(
                    "unknown key `{key}` (expected one of {})",
                    allowed.join(", ")
                ),
            ));
        }
        let parsed = number(value, col + field.len() - value.len())?;
        if map.insert(key.to_string(), parsed).is_some() {
            return Err(error_at(col + 1, format!("duplicate key `{key}`")));
        }
    }
    Ok(KeyValues(map))
}

fn expect_arity<'a>(
    kind: &str,
    args: &'a str,
    offset: usize,
    n: usize,
) -> Result<Vec<(&'a str, usize)>> {
    let f = fields(args, offset);
    if f.len() != n {
        return Err(error_at(
            offset + 1,
            format!("`{kind}` takes {n} comma-separated values, got {}", f.len()),
        ));
    }
    Ok(f)
}

fn with_column(column: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::Parse { .. } => e,
        other => error_at(column, other.to_string()),
    }
}

/// Default curve for `equiarc:` descriptors without an explicit curve.
pub fn default_arclength_curve() -> AnalyticFunction {
    functions::sinusoid(1.0, 2.0 * PI, 0.0)
}

/// Builds a mesh from a descriptor. `default_beta` applies to bare `+insert`
/// suffixes.
pub fn mesh(spec: &str, default_beta: f64) -> Result<Mesh> {
    let mut parts = spec.split("+insert");
    let base = parts.next().unwrap_or_default();
    let mut consumed = base.len();
    let mut mesh = base_mesh(base.trim_end())?;
    for suffix in parts {
        let col = consumed + "+insert".len();
        let beta = match suffix.strip_prefix(':') {
            Some(b) => number(b, col + 1)?,
            None if suffix.trim().is_empty() => default_beta,
            None => {
                return Err(error_at(
                    col + 1,
                    format!("unexpected `{suffix}` after +insert"),
                ))
            }
        };
        mesh = mesh.refine_insert(beta).map_err(with_column(col + 1))?;
        consumed = col + suffix.len();
    }
    Ok(mesh)
}

fn base_mesh(spec: &str) -> Result<Mesh> {
    let Some((kind, args)) = spec.split_once(':') else {
        return Err(error_at(
            1,
            format!("expected <kind>:<values>, got `{spec}`"),
        ));
    };
    let offset = kind.len() + 1;
    let at = with_column(1);
    match kind.trim() {
        "uniform" => {
            let f = expect_arity(kind, args, offset, 3)?;
            Mesh::uniform(number(f[0].0, f[0].1)?, number(f[1].0, f[1].1)?, count(f[2].0, f[2].1)?)
                .map_err(at)
        }
        "geometric" => {
            let f = expect_arity(kind, args, offset, 4)?;
            Mesh::geometric(
                number(f[0].0, f[0].1)?,
                number(f[1].0, f[1].1)?,
                number(f[2].0, f[2].1)?,
                count(f[3].0, f[3].1)?,
            )
            .map_err(at)
        }
        "equiarc" => {
            let f = fields(args, offset);
            if f.len() < 3 {
                return Err(error_at(offset + 1, "`equiarc` takes [curve,]a,b,n"));
            }
            let tail = &f[f.len() - 3..];
            let curve = if f.len() == 3 {
                default_arclength_curve()
            } else {
                let end = tail[0].1 - offset - 1;
                functions::from_label(&args[..end]).map_err(|e| match e {
                    Error::Parse { column, message, .. } => error_at(offset + column, message),
                    other => error_at(offset + 1, other.to_string()),
                })?
            };
            Mesh::equiarclength(
                &curve,
                number(tail[0].0, tail[0].1)?,
                number(tail[1].0, tail[1].1)?,
                count(tail[2].0, tail[2].1)?,
                DEFAULT_QUAD_RESOLUTION,
            )
            .map_err(at)
        }
        "jitter" => {
            let f = expect_arity(kind, args, offset, 5)?;
            Mesh::jittered(
                number(f[0].0, f[0].1)?,
                number(f[1].0, f[1].1)?,
                count(f[2].0, f[2].1)?,
                number(f[3].0, f[3].1)?,
                count(f[4].0, f[4].1)? as u64,
            )
            .map_err(at)
        }
        "points" => Mesh::from_points(number_list(args, offset)?).map_err(at),
        other => Err(error_at(
            1,
            format!("unknown mesh kind `{other}` (expected uniform, geometric, equiarc, jitter or points)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(number("-1", 0).unwrap(), -1.0);
        assert_eq!(number("4pi", 0).unwrap(), 4.0 * PI);
        assert_eq!(number("4pi^2", 0).unwrap(), 4.0 * PI * PI);
        assert_eq!(number("50/59", 0).unwrap(), 50.0 / 59.0);
        assert_eq!(number("pi/2", 0).unwrap(), PI / 2.0);
        assert_eq!(number("1e-3", 0).unwrap(), 1e-3);
        assert_eq!(number(" 0.25 ", 0).unwrap(), 0.25);
    }

    #[test]
    fn number_errors_report_columns() {
        match number("4pix", 10) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 14);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(number("", 0).is_err());
        assert!(number("1/0", 0).is_err());
        assert!(number("1.2.3", 0).is_err());
    }

    #[test]
    fn mesh_descriptors() {
        assert_eq!(
            mesh("uniform:0,1,23", 0.7).unwrap(),
            Mesh::uniform(0.0, 1.0, 23).unwrap()
        );
        assert_eq!(
            mesh("geometric:0,1/10,50/59,200", 0.7).unwrap(),
            Mesh::geometric(0.0, 0.1, 50.0 / 59.0, 200).unwrap()
        );
        let refined = mesh("uniform:0,1,12+insert:0.5", 0.7).unwrap();
        assert_eq!(refined.len(), 23);
        let default_beta = mesh("points:0,1+insert", 0.7).unwrap();
        assert_eq!(default_beta.points(), &[0.0, 0.7, 1.0]);
        let twice = mesh("points:0,1+insert:0.5+insert:0.5", 0.7).unwrap();
        assert_eq!(twice.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let e1 = mesh("equiarc:0,1,12", 0.7).unwrap();
        let e2 = mesh("equiarc:sinusoid:frequency=2pi,0,1,12", 0.7).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(mesh("jitter:0,1,44,0.3,5", 0.7).unwrap().len(), 45);
    }

    #[test]
    fn mesh_descriptor_errors() {
        for bad in [
            "uniform:0,1",
            "uniform:1,0,5",
            "cheb:0,1,5",
            "uniform:0,1,2.5",
            "points:0,1+insert:2",
            "points:0,1+insertx",
            "equiarc:cosh:1,0,1,5",
        ] {
            assert!(matches!(mesh(bad, 0.7), Err(Error::Parse { .. })), "{bad}");
        }
        match mesh("uniform:0,x,5", 0.7) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 11),
            other => panic!("unexpected {other:?}"),
        }
    }
}
