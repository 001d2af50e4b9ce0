use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heisenberg::Angle;

use super::{generators, io, DiscreteMeasure};

/// A textual recipe for a measure, e.g. `parabola:n=4096,beta=1`,
/// `cantor:a=1,b=0.5,depth=10,theta0=0,R=1` or `file:path/to/m.csv`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Parabola { n: usize, beta: f64 },
    Cantor { a: f64, b: f64, depth: u32, theta0: f64, radius: f64 },
    File(PathBuf),
}

impl MeasureSpec {
    pub fn build(&self) -> Result<DiscreteMeasure> {
        match self {
            MeasureSpec::Parabola { n, beta } => generators::parabola_measure(*n, *beta),
            MeasureSpec::Cantor { a, b, depth, theta0, radius } => {
                generators::product_cantor_measure(Angle::new(*theta0)?, *a, *b, *depth, *radius)
            }
            MeasureSpec::File(path) => io::load_measure(path),
        }
    }

    /// Heisenberg dimension of the generated measure, when known.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            MeasureSpec::Parabola { beta, .. } => Some(2.0 * beta),
            MeasureSpec::Cantor { a, b, .. } => Some(a + 2.0 * b),
            MeasureSpec::File(_) => None,
        }
    }
}

fn parse_params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in body.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::invalid("measure", format!("`{item}` is not key=value")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take<T: FromStr>(map: &mut BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T> {
    match map.remove(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| Error::invalid("measure", format!("bad value `{raw}` for `{key}`"))),
        None => default.ok_or_else(|| Error::invalid("measure", format!("missing `{key}`"))),
    }
}

fn reject_leftovers(map: &BTreeMap<String, String>) -> Result<()> {
    match map.keys().next() {
        Some(k) => Err(Error::invalid("measure", format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "parabola" => {
                let mut m = parse_params(body)?;
                let n = take(&mut m, "n", Some(4096usize))?;
                let beta = take(&mut m, "beta", Some(1.0))?;
                reject_leftovers(&m)?;
                Ok(MeasureSpec::Parabola { n, beta })
            }
            "cantor" => {
                let mut m = parse_params(body)?;
                let a = take(&mut m, "a", None)?;
                let b = take(&mut m, "b", None)?;
                let depth = take(&mut m, "depth", Some(8u32))?;
                let theta0 = take(&mut m, "theta0", Some(0.0))?;
                let radius = take(&mut m, "R", Some(1.0))?;
                reject_leftovers(&m)?;
                Ok(MeasureSpec::Cantor { a, b, depth, theta0, radius })
            }
            "file" if !body.is_empty() => Ok(MeasureSpec::File(PathBuf::from(body))),
            _ => Err(Error::invalid("measure", format!("unrecognised measure spec `{s}`"))),
        }
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Parabola { n, beta } => write!(f, "parabola:n={n},beta={beta}"),
            MeasureSpec::Cantor { a, b, depth, theta0, radius } => {
                write!(f, "cantor:a={a},b={b},depth={depth},theta0={theta0},R={radius}")
            }
            MeasureSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
