use std::path::Path;

use clap::Args;
use serde::Serialize;

use heisproj::measures::{pushforward_projection, save_planar_measure};
use heisproj::Angle;

use super::{build_measure, keys, resolve_measure, Violations};
use crate::config::FileConfig;
use crate::error::CliResult;
use crate::output::OutDir;

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Measure spec, e.g. `parabola:n=4096,beta=1`.
    #[arg(long)]
    pub measure: Option<String>,
    /// Projection angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ProjectConfig {
    pub measure: String,
    pub seed: u64,
    pub theta: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    n_points: usize,
    mass_in: f64,
    mass_out: f64,
    v_range: (f64, f64),
    t_range: (f64, f64),
    max_abs_t: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a ProjectConfig,
    summary: Summary,
}

pub fn run(args: ProjectArgs, file: &FileConfig, seed: u64, out: &Path) -> CliResult<Violations> {
    file.check_keys(&keys(&["theta"]))?;
    let spec = resolve_measure(file, args.measure, "parabola:n=4096,beta=1")?;
    let cfg = ProjectConfig {
        measure: spec.to_string(),
        seed,
        theta: file.resolve("theta", args.theta, 0.0)?,
    };
    let mu = build_measure(&spec, seed)?;
    let nu = pushforward_projection(&mu, Angle::new(cfg.theta)?);

    let range = |f: &dyn Fn(usize) -> f64| {
        (0..nu.len()).map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let t_range = range(&|i| nu.points()[i].t);
    let summary = Summary {
        n_points: nu.len(),
        mass_in: mu.mass(),
        mass_out: nu.mass(),
        v_range: range(&|i| nu.points()[i].v),
        t_range,
        max_abs_t: t_range.0.abs().max(t_range.1.abs()),
    };
    let mut violations = Vec::new();
    if (summary.mass_out - summary.mass_in).abs() > 1e-12 * summary.mass_in {
        violations.push(format!("mass changed from {} to {}", summary.mass_in, summary.mass_out));
    }
    let dir = OutDir::create(out)?;
    save_planar_measure(&nu, &dir.path("projection.csv"))?;
    dir.write_json("projection.json", &Report { command: "project", config: &cfg, summary })?;
    Ok(violations)
}
