use std::path::Path;

use clap::Args;
use serde::Serialize;

use heisproj::oscillatory::{lhs_main_inequality_detailed, PairSum};

use super::{build_measure, fit_slope, keys, resolve_measure, DomainConfig, Violations};
use crate::config::{parse_range, FileConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, OutDir};
use crate::svg::{render, Chart, Series};

/// Largest j with full pair enumeration.
const MAX_J: u32 = 8;
/// Allowed excess of the fitted exponent over `3 − α`.
const EXPONENT_SLACK: f64 = 0.5;

#[derive(Debug, Args)]
pub struct OscillatoryArgs {
    #[arg(long)]
    pub measure: Option<String>,
    /// Inclusive range of dyadic indices, e.g. `0..6`.
    #[arg(long)]
    pub j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub modulus: Option<String>,
    /// Relative tolerance of each pair sum.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct OscillatoryConfig {
    pub measure: String,
    pub seed: u64,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(flatten)]
    pub domain: DomainConfig,
    pub tol: f64,
}

#[derive(Serialize)]
struct Row {
    j: u32,
    lhs: f64,
    log2_lhs: f64,
    /// `2^{3j+2} |domain| mass²`, the pointwise bound summed over pairs.
    trivial_bound: f64,
    #[serde(flatten)]
    detail: PairSum,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a OscillatoryConfig,
    domain_length: f64,
    rows: Vec<Row>,
    fitted_exponent: Option<f64>,
    alpha: Option<f64>,
    envelope_exponent: Option<f64>,
    within_envelope: Option<bool>,
}

pub fn run(args: OscillatoryArgs, file: &FileConfig, seed: u64, out: &Path) -> CliResult<Violations> {
    file.check_keys(&keys(&["j", "theta0", "epsilon", "modulus", "tol"]))?;
    let spec = resolve_measure(file, args.measure, "parabola:n=128,beta=1")?;
    let range: String = file.resolve("j", args.j, "0..6".to_string())?;
    let (j_min, j_max) = parse_range("j", &range)?;
    if j_max > MAX_J {
        return Err(CliError::Config(format!("j = {j_max} exceeds {MAX_J}")));
    }
    let cfg = OscillatoryConfig {
        measure: spec.to_string(),
        seed,
        j_min,
        j_max,
        domain: DomainConfig::resolve(file, (args.theta0, args.epsilon, args.modulus), "4")?,
        tol: file.resolve("tol", args.tol, 1e-3)?,
    };
    let domain = cfg.domain.domain()?;
    let mu = build_measure(&spec, seed)?;
    let mass = mu.mass();

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for j in j_min..=j_max {
        let detail = lhs_main_inequality_detailed(&mu, j, &domain, cfg.tol)?;
        let trivial_bound = 2f64.powi(3 * j as i32 + 2) * domain.total_length() * mass * mass;
        if detail.value > trivial_bound * (1.0 + 1e-9) {
            violations.push(format!("j = {j}: {} exceeds the pointwise bound {trivial_bound}", detail.value));
        }
        rows.push(Row {
            j,
            lhs: detail.value,
            log2_lhs: detail.value.log2(),
            trivial_bound,
            detail,
        });
    }
    let fitted_exponent = (rows.len() >= 2).then(|| {
        let js: Vec<f64> = rows.iter().map(|r| r.j as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.log2_lhs).collect();
        fit_slope(&js, &ys)
    });
    let alpha = spec.alpha();
    let envelope_exponent = alpha.map(|a| 3.0 - a);
    let within_envelope = fitted_exponent.zip(envelope_exponent).map(|(f, e)| f <= e + EXPONENT_SLACK);

    let mut csv = String::from("j,lhs,pairs_integrated,pairs_bounded,remainder_bound\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.j,
            num(r.lhs),
            r.detail.pairs_integrated,
            r.detail.pairs_bounded,
            num(r.detail.remainder_bound)
        ));
    }
    let mut series = vec![Series {
        label: "log₂ lhs".into(),
        points: rows.iter().map(|r| (r.j as f64, r.log2_lhs)).collect(),
    }];
    if let (Some(e), Some(first)) = (envelope_exponent, rows.first()) {
        series.push(Series {
            label: format!("slope {e} reference"),
            points: rows.iter().map(|r| (r.j as f64, first.log2_lhs + e * (r.j - first.j) as f64)).collect(),
        });
    }
    let chart = Chart {
        title: format!("dyadic pair sums, {}", cfg.measure),
        x_label: "j".into(),
        y_label: "log₂ value".into(),
        log_y: false,
        series,
    };
    let dir = OutDir::create(out)?;
    dir.write("oscillatory.csv", &csv)?;
    dir.write("oscillatory.svg", &render(&chart))?;
    dir.write_json(
        "oscillatory.json",
        &Report {
            command: "oscillatory",
            config: &cfg,
            domain_length: domain.total_length(),
            rows,
            fitted_exponent,
            alpha,
            envelope_exponent,
            within_envelope,
        },
    )?;
    Ok(violations)
}
