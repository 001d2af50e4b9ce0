//! Riesz energies of projected measures, excluded-angle domains, θ-sweeps
//! and numerical checks of the Fourier transform of `f_s`.

mod domain;
mod fourier;
mod plancherel;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::PlanarMeasure;
use crate::reduce::pairwise_sum;

pub use domain::{excluded_domain, AngleDomain, Modulus};
pub use fourier::{
    band_samples, fourier_fs_check, fs_transform_grid, FourierGrid, FourierReport, FourierSample,
};
pub use plancherel::{
    bin_measure, inverse_fourier, plancherel_check, plancherel_check_with, BinnedMeasure,
    PlancherelOptions, PlancherelReport,
};
pub use sweep::{energy_theta_sweep, SweepReport};

/// Pair kernel used for planar energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `((Δv)⁴ + 16(Δt)²)^{-s/4}`, the Korányi distance to the power `-s`.
    #[default]
    Koranyi,
    /// `f_s(|Δv|, Δt) = ((Δv)⁴ + (Δt)²)^{-s/4}`.
    Fs,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Koranyi => "koranyi",
            Kernel::Fs => "fs",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "koranyi" => Ok(Kernel::Koranyi),
            "fs" => Ok(Kernel::Fs),
            other => Err(Error::invalid("kernel", format!("`{other}` is not koranyi or fs"))),
        }
    }
}

pub(crate) fn check_exponent(s: f64, lo: f64, hi: f64) -> Result<()> {
    if s > lo && s < hi {
        Ok(())
    } else {
        Err(Error::invalid("s", format!("{s} is not in ({lo}, {hi})")))
    }
}

/// `f_s(x, t) = (x⁴ + t²)^{-s/4}` without intermediate under- or overflow.
/// The caller guarantees `(x, t) ≠ (0, 0)`.
#[inline]
pub(crate) fn fs_unchecked(x: f64, t: f64, s: f64) -> f64 {
    let x2 = x * x;
    let q = x2 * x2 + t * t;
    if q > 1e-280 && q < 1e280 {
        return q.powf(-0.25 * s);
    }
    let at = t.abs();
    if x2 >= at {
        let r = at / x2;
        x2.powf(-0.5 * s) * (1.0 + r * r).powf(-0.25 * s)
    } else {
        let r = x2 / at;
        at.powf(-0.5 * s) * (1.0 + r * r).powf(-0.25 * s)
    }
}

/// `f_s(x, t) = (x⁴ + t²)^{-s/4}` for `s ∈ (0, 3)`.
pub fn kernel_fs(x: f64, t: f64, s: f64) -> Result<f64> {
    check_exponent(s, 0.0, 3.0)?;
    if x == 0.0 && t == 0.0 {
        return Err(Error::SingularInput);
    }
    Ok(fs_unchecked(x, t, s))
}

/// Off-diagonal energy together with the smallest in-plane Korányi distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub energy: f64,
    pub min_separation: f64,
}

/// `Σ_{i≠j} w_i w_j K(p_i, p_j)` for the chosen kernel.
pub fn discrete_energy(nu: &PlanarMeasure, s: f64, kernel: Kernel) -> Result<f64> {
    discrete_energy_detailed(nu, s, kernel).map(|e| e.energy)
}

/// Like [`discrete_energy`], also reporting the minimum pairwise separation.
pub fn discrete_energy_detailed(nu: &PlanarMeasure, s: f64, kernel: Kernel) -> Result<EnergyValue> {
    check_exponent(s, 0.0, 3.0)?;
    let n = nu.len();
    let v: Vec<f64> = nu.points().iter().map(|p| p.v).collect();
    let t: Vec<f64> = nu.points().iter().map(|p| p.t).collect();
    let w = nu.weights();
    let tscale = match kernel {
        Kernel::Koranyi => 16.0,
        Kernel::Fs => 1.0,
    };
    let power = -0.25 * s;

    // Row i covers pairs (i, j > i); rows are summed in index order.
    let rows: Vec<(f64, f64, Option<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (vi, ti) = (v[i], t[i]);
            let mut acc = 0.0;
            let mut min_q = f64::INFINITY;
            for j in i + 1..n {
                let dv = v[j] - vi;
                let dt = t[j] - ti;
                let dv2 = dv * dv;
                let q = dv2 * dv2 + tscale * dt * dt;
                if q == 0.0 {
                    return (acc, 0.0, Some(j));
                }
                let qk = if tscale == 16.0 { q } else { dv2 * dv2 + 16.0 * dt * dt };
                min_q = min_q.min(qk);
                acc += w[j] * q.powf(power);
            }
            (w[i] * acc, min_q, None)
        })
        .collect();

    if let Some((i, (_, _, Some(j)))) = rows.iter().enumerate().find(|(_, r)| r.2.is_some()) {
        return Err(Error::DegeneratePair { i, j: *j });
    }
    let sums: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let min_q = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(EnergyValue {
        energy: 2.0 * pairwise_sum(&sums),
        min_separation: min_q.sqrt().sqrt(),
    })
}
