use std::path::Path;

use clap::Args;
use serde::Serialize;

use heisproj::energy::{energy_theta_sweep, Kernel};

use super::{build_measure, keys, resolve_measure, DomainConfig, Violations};
use crate::config::FileConfig;
use crate::error::CliResult;
use crate::output::OutDir;
use crate::svg::{render, Chart, Series};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub measure: Option<String>,
    /// Energy exponent.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// Half-width of the excluded neighbourhoods.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// 2 or 4.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Number of grid angles.
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// `koranyi` or `fs`.
    #[arg(long)]
    pub kernel: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepConfig {
    pub measure: String,
    pub seed: u64,
    pub s: f64,
    #[serde(flatten)]
    pub domain: DomainConfig,
    pub n_theta: usize,
    pub kernel: Kernel,
}

#[derive(Serialize)]
struct Summary {
    integral: f64,
    max_energy: f64,
    median_energy: f64,
    max_over_median: f64,
    n_points: usize,
    n_angles: usize,
    min_separation: f64,
    domain: Vec<(f64, f64)>,
    domain_length: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a SweepConfig,
    summary: Summary,
}

pub fn run(args: SweepArgs, file: &FileConfig, seed: u64, out: &Path) -> CliResult<Violations> {
    file.check_keys(&keys(&["s", "theta0", "epsilon", "modulus", "n_theta", "kernel"]))?;
    let spec = resolve_measure(file, args.measure, "parabola:n=1024,beta=1")?;
    let kernel: String = file.resolve("kernel", args.kernel, "koranyi".to_string())?;
    let cfg = SweepConfig {
        measure: spec.to_string(),
        seed,
        s: file.resolve("s", args.s, 1.75)?,
        domain: DomainConfig::resolve(file, (args.theta0, args.epsilon, args.modulus), "2")?,
        n_theta: file.resolve("n_theta", args.n_theta, 64)?,
        kernel: kernel.parse()?,
    };
    let domain = cfg.domain.domain()?;
    let mu = build_measure(&spec, seed)?;
    let report = energy_theta_sweep(&mu, cfg.s, &domain, cfg.n_theta, cfg.kernel)?;

    let mut violations = Vec::new();
    if !report.integral.is_finite() || report.energies.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        violations.push("non-finite or non-positive energy on the grid".to_string());
    }
    let summary = Summary {
        integral: report.integral,
        max_energy: report.max_energy(),
        median_energy: report.median_energy(),
        max_over_median: report.max_energy() / report.median_energy(),
        n_points: report.n_points,
        n_angles: report.thetas.len(),
        min_separation: report.min_separation,
        domain: domain.intervals().to_vec(),
        domain_length: domain.total_length(),
    };
    let dir = OutDir::create(out)?;
    dir.write("sweep.csv", &report.to_csv())?;
    dir.write_json("sweep.json", &Report { command: "sweep", config: &cfg, summary })?;
    let chart = Chart {
        title: format!("projected {}-energy, {}", cfg.s, cfg.measure),
        x_label: "θ".into(),
        y_label: "I_s".into(),
        log_y: true,
        series: vec![Series {
            label: format!("kernel {}", cfg.kernel),
            points: report.thetas.iter().copied().zip(report.energies.iter().copied()).collect(),
        }],
    };
    dir.write("sweep.svg", &render(&chart))?;
    Ok(violations)
}
