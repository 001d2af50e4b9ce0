use std::path::Path;

use clap::Args;
use serde::Serialize;

use heisproj::dimension::{projected_dimension_profile, DimensionEstimate};
use heisproj::energy::{excluded_domain, Modulus};
use heisproj::Angle;

use super::{build_measure, keys, resolve_measure, Violations};
use crate::config::{parse_range, parse_reals, FileConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, OutDir};
use crate::svg::{render, Chart, Series};

/// Projected sets live in a plane of Heisenberg dimension 3.
const PLANE_DIMENSION: f64 = 3.0;
const SLACK: f64 = 0.2;

#[derive(Debug, Args)]
pub struct DimsArgs {
    #[arg(long)]
    pub measure: Option<String>,
    /// Explicit angles, comma separated; overrides the grid.
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: Option<String>,
    /// Number of grid angles (midpoints of the domain).
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// Excluded half-width around the special angles; 0 keeps all of [0, π).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub modulus: Option<String>,
    /// Scales: `a..b` for 2^-a..2^-b, or a comma-separated list.
    #[arg(long)]
    pub deltas: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DimsConfig {
    pub measure: String,
    pub seed: u64,
    pub thetas: Vec<f64>,
    pub deltas: Vec<f64>,
}

#[derive(Serialize)]
struct Row {
    theta: f64,
    estimate: DimensionEstimate,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a DimsConfig,
    profile: Vec<Row>,
}

fn parse_deltas(text: &str) -> CliResult<Vec<f64>> {
    if text.contains("..") {
        let (a, b) = parse_range("deltas", text)?;
        Ok((a..=b).map(|k| 2f64.powi(-(k as i32))).collect())
    } else {
        parse_reals("deltas", text)
    }
}

fn grid(file: &FileConfig, args: &DimsArgs) -> CliResult<Vec<f64>> {
    if let Some(list) = file.resolve_opt::<String>("thetas", args.thetas.clone())? {
        return parse_reals("thetas", &list);
    }
    let n: usize = file.resolve("n_theta", args.n_theta, 16)?;
    if n == 0 {
        return Err(CliError::Config("n_theta must be positive".into()));
    }
    let theta0 = file.resolve("theta0", args.theta0, 0.0)?;
    let epsilon = file.resolve("epsilon", args.epsilon, 0.0)?;
    let modulus: String = file.resolve("modulus", args.modulus.clone(), "2".to_string())?;
    let modulus: Modulus = modulus.parse()?;
    let domain = excluded_domain(Angle::new(theta0)?, epsilon, modulus)?;
    let total = domain.total_length();
    let mut thetas = Vec::with_capacity(n);
    for &(lo, hi) in domain.intervals() {
        let m = ((n as f64 * (hi - lo) / total).round() as usize).max(1);
        thetas.extend((0..m).map(|i| lo + (i as f64 + 0.5) * (hi - lo) / m as f64));
    }
    Ok(thetas)
}

pub fn run(args: DimsArgs, file: &FileConfig, seed: u64, out: &Path) -> CliResult<Violations> {
    file.check_keys(&keys(&["thetas", "n_theta", "theta0", "epsilon", "modulus", "deltas"]))?;
    let spec = resolve_measure(file, args.measure.clone(), "parabola:n=65536,beta=1")?;
    let deltas: String = file.resolve("deltas", args.deltas.clone(), "4..9".to_string())?;
    let cfg = DimsConfig {
        measure: spec.to_string(),
        seed,
        thetas: grid(file, &args)?,
        deltas: parse_deltas(&deltas)?,
    };
    let angles = cfg.thetas.iter().map(|&t| Angle::new(t)).collect::<heisproj::Result<Vec<_>>>()?;
    let mu = build_measure(&spec, seed)?;
    let profile = projected_dimension_profile(&mu, &angles, &cfg.deltas)?;

    let mut violations = Vec::new();
    let mut csv = String::from("theta,slope,r2,saturated\n");
    for (theta, est) in &profile {
        if est.slope > PLANE_DIMENSION + SLACK {
            violations.push(format!("θ = {theta}: slope {} exceeds the plane dimension", est.slope));
        }
        csv.push_str(&format!("{},{},{},{}\n", num(*theta), num(est.slope), num(est.r2), est.flags.saturated));
    }
    let chart = Chart {
        title: format!("projected box dimension, {}", cfg.measure),
        x_label: "θ".into(),
        y_label: "dimension".into(),
        log_y: false,
        series: vec![Series {
            label: "box-count slope".into(),
            points: profile.iter().map(|(t, e)| (*t, e.slope)).collect(),
        }],
    };
    let dir = OutDir::create(out)?;
    dir.write("dims.csv", &csv)?;
    dir.write("dims.svg", &render(&chart))?;
    let rows = profile.into_iter().map(|(theta, estimate)| Row { theta, estimate }).collect();
    dir.write_json("dims.json", &Report { command: "dims", config: &cfg, profile: rows })?;
    Ok(violations)
}
