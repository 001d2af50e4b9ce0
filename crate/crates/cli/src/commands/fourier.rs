use std::path::Path;

use clap::Args;
use serde::Serialize;

use heisproj::energy::{band_samples, fourier_fs_check, FourierGrid};

use super::Violations;
use crate::config::{parse_reals, FileConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, OutDir};

#[derive(Debug, Args)]
pub struct FourierArgs {
    /// Kernel exponent in (1, 3).
    #[arg(long)]
    pub s: Option<f64>,
    /// Half-width T of the truncation window.
    #[arg(long)]
    pub extent: Option<f64>,
    /// Finest mesh width h.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Anisotropic directions sampled in the band.
    #[arg(long)]
    pub n_dir: Option<usize>,
    /// Radii sampled per direction.
    #[arg(long)]
    pub n_rad: Option<usize>,
    /// Explicit frequencies `xi1:xi2`, comma separated; replaces the default samples.
    #[arg(long)]
    pub frequencies: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FourierConfig {
    pub seed: u64,
    pub s: f64,
    pub extent: f64,
    pub resolution: f64,
    pub n_dir: usize,
    pub n_rad: usize,
    pub frequencies: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a FourierConfig,
    passed: bool,
    report: heisproj::energy::FourierReport,
}

fn parse_frequencies(text: &str) -> CliResult<Vec<[f64; 2]>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("frequency `{pair}` is not `xi1:xi2`")))?;
            let v = parse_reals("frequencies", &format!("{a},{b}"))?;
            Ok([v[0], v[1]])
        })
        .collect()
}

pub fn run(args: FourierArgs, file: &FileConfig, seed: u64, out: &Path) -> CliResult<Violations> {
    file.check_keys(&["out", "seed", "threads", "s", "extent", "resolution", "n_dir", "n_rad", "frequencies"])?;
    let defaults = FourierGrid::default();
    let frequencies = file
        .resolve_opt::<String>("frequencies", args.frequencies)?
        .map(|f| parse_frequencies(&f))
        .transpose()?;
    let cfg = FourierConfig {
        seed,
        s: file.resolve("s", args.s, 2.0)?,
        extent: file.resolve("extent", args.extent, defaults.extent)?,
        resolution: file.resolve("resolution", args.resolution, defaults.resolution)?,
        n_dir: file.resolve("n_dir", args.n_dir, 7)?,
        n_rad: file.resolve("n_rad", args.n_rad, 4)?,
        frequencies,
    };
    let grid = FourierGrid::new(cfg.extent, cfg.resolution)?;
    let samples = match &cfg.frequencies {
        Some(f) => f.clone(),
        None => band_samples(&grid, cfg.n_dir, cfg.n_rad),
    };
    let report = fourier_fs_check(cfg.s, &grid, &samples)?;

    let mut violations = Vec::new();
    if report.positivity_violations > 0 {
        violations.push(format!("{} frequencies without certified positivity", report.positivity_violations));
    }
    if report.ratio_violations > 0 {
        violations.push(format!("{} rays with ratio spread above tolerance", report.ratio_violations));
    }
    if !report.constant.is_finite() {
        violations.push("ratio constant is not finite".into());
    }
    let mut csv = String::from("xi1,xi2,value,positivity_margin,reference,ratio\n");
    for p in &report.samples {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(p.xi1),
            num(p.xi2),
            num(p.value),
            num(p.positivity_margin),
            num(p.reference),
            num(p.ratio)
        ));
    }
    let dir = OutDir::create(out)?;
    dir.write("fourier.csv", &csv)?;
    dir.write_json(
        "fourier.json",
        &Report {
            command: "fourier-check",
            config: &cfg,
            passed: report.passed(),
            report,
        },
    )?;
    Ok(violations)
}
