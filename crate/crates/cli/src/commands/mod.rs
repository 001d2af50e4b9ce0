pub mod dims;
pub mod fourier;
pub mod oscillatory;
pub mod project;
pub mod sweep;

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use heisproj::energy::{excluded_domain, AngleDomain, Modulus};
use heisproj::measures::{DiscreteMeasure, MeasureSpec};
use heisproj::Angle;

use crate::config::FileConfig;
use crate::error::{CliError, CliResult};

/// Problems found by a command's invariant checks; any makes the exit code 3.
pub type Violations = Vec<String>;

/// Keys every command accepts.
pub const COMMON_KEYS: [&str; 4] = ["out", "seed", "threads", "measure"];

pub fn keys<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    COMMON_KEYS.iter().copied().chain(extra.iter().copied()).collect()
}

pub fn resolve_measure(file: &FileConfig, flag: Option<String>, default: &str) -> CliResult<MeasureSpec> {
    let text: String = file.resolve("measure", flag, default.to_string())?;
    text.parse().map_err(CliError::from)
}

pub fn build_measure(spec: &MeasureSpec, seed: u64) -> CliResult<DiscreteMeasure> {
    Ok(spec.build()?.with_seed(seed))
}

/// The angle-domain parameters shared by the sweep and oscillatory commands.
#[derive(Debug, Clone, Serialize)]
pub struct DomainConfig {
    pub theta0: f64,
    pub epsilon: f64,
    pub modulus: u32,
}

impl DomainConfig {
    pub fn resolve(
        file: &FileConfig,
        flags: (Option<f64>, Option<f64>, Option<String>),
        default_modulus: &str,
    ) -> CliResult<Self> {
        let theta0 = file.resolve("theta0", flags.0, FRAC_PI_2)?;
        let epsilon = file.resolve("epsilon", flags.1, 0.15)?;
        let modulus: String = file.resolve("modulus", flags.2, default_modulus.to_string())?;
        let modulus: Modulus = modulus.parse()?;
        Ok(DomainConfig {
            theta0,
            epsilon,
            modulus: modulus.value(),
        })
    }

    pub fn domain(&self) -> CliResult<AngleDomain> {
        let modulus: Modulus = self.modulus.to_string().parse()?;
        Ok(excluded_domain(Angle::new(self.theta0)?, self.epsilon, modulus)?)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}
