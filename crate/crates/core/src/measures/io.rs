use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::heisenberg::{HPoint, PlanarPoint};

use super::{DiscreteMeasure, MeasureMeta, PlanarMeasure};

/// Sidecar path holding the metadata of a measure file: `foo.csv` → `foo.meta.json`.
pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn write_rows(path: &Path, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    let write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    };
    write().map_err(|e| io_err(path, e))
}

/// Parses a CSV with the given header into rows of `width` numbers; the last
/// column is a weight and must be positive.
fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let width = header.split(',').count();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        None => return Err(parse_err(path, 1, "empty file")),
        Some((_, first)) if first.trim() != header => {
            return Err(parse_err(path, 1, format!("expected header `{header}`, found `{}`", first.trim())))
        }
        Some(_) => {}
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(parse_err(path, lineno, format!("expected {width} columns, found {}", cells.len())));
        }
        let mut row = Vec::with_capacity(width);
        for cell in cells {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, format!("`{cell}` is not finite")));
            }
            row.push(v);
        }
        if row[width - 1] <= 0.0 {
            return Err(parse_err(path, lineno, format!("weight {} is not positive", row[width - 1])));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    Ok(rows)
}

/// Writes `x,y,t,w` rows with 17 significant digits plus a JSON metadata sidecar.
pub fn save_measure(mu: &DiscreteMeasure, path: &Path) -> Result<()> {
    let rows = mu
        .points()
        .iter()
        .zip(mu.weights())
        .map(|(p, &w)| vec![p.x, p.y, p.t, w]);
    write_rows(path, "x,y,t,w", rows)?;
    let meta = meta_path(path);
    let json = serde_json::to_string_pretty(mu.meta()).expect("metadata serializes");
    fs::write(&meta, json + "\n").map_err(|e| io_err(&meta, e))
}

/// Reads a measure written by [`save_measure`]. A missing sidecar yields
/// metadata with generator `file`.
pub fn load_measure(path: &Path) -> Result<DiscreteMeasure> {
    let rows = read_rows(path, "x,y,t,w")?;
    let sidecar = meta_path(path);
    let meta = if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|e| io_err(&sidecar, e))?;
        serde_json::from_str(&text).map_err(|e| parse_err(&sidecar, e.line(), e.to_string()))?
    } else {
        MeasureMeta::new("file")
    };
    let points = rows.iter().map(|r| HPoint::new(r[0], r[1], r[2])).collect();
    let weights = rows.iter().map(|r| r[3]).collect();
    DiscreteMeasure::new(points, weights, meta)
}

/// Writes `v,t,w` rows with 17 significant digits.
pub fn save_planar_measure(nu: &PlanarMeasure, path: &Path) -> Result<()> {
    let rows = nu.points().iter().zip(nu.weights()).map(|(p, &w)| vec![p.v, p.t, w]);
    write_rows(path, "v,t,w", rows)
}

pub fn load_planar_measure(path: &Path) -> Result<PlanarMeasure> {
    let rows = read_rows(path, "v,t,w")?;
    let points = rows.iter().map(|r| PlanarPoint::new(r[0], r[1])).collect();
    let weights = rows.iter().map(|r| r[2]).collect();
    PlanarMeasure::new(points, weights)
}
