use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::Angle;
use crate::measures::{pushforward_projection, DiscreteMeasure};
use crate::reduce::pairwise_sum;

use super::{check_exponent, discrete_energy_detailed, AngleDomain, Kernel};

/// Energies of projected measures over an angle grid and their θ-integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub s: f64,
    pub kernel: Kernel,
    pub thetas: Vec<f64>,
    pub energies: Vec<f64>,
    /// Midpoint-rule weight of each grid angle.
    pub weights: Vec<f64>,
    pub domain: AngleDomain,
    pub integral: f64,
    pub n_points: usize,
    /// Smallest in-plane Korányi distance between projected atoms over the grid.
    pub min_separation: f64,
}

impl SweepReport {
    /// `theta,energy` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,energy\n");
        for (t, e) in self.thetas.iter().zip(&self.energies) {
            writeln!(out, "{t:.16e},{e:.16e}").expect("writing to a String");
        }
        out
    }

    pub fn max_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn median_energy(&self) -> f64 {
        let mut e = self.energies.clone();
        e.sort_by(f64::total_cmp);
        let m = e.len() / 2;
        if e.len() % 2 == 1 {
            e[m]
        } else {
            0.5 * (e[m - 1] + e[m])
        }
    }
}

/// Midpoint grid: each interval gets a share of `n_theta` nodes proportional
/// to its length (at least one). Returns `(theta, weight)` pairs.
pub(crate) fn midpoint_grid(domain: &AngleDomain, n_theta: usize) -> Vec<(f64, f64)> {
    let total = domain.total_length();
    let mut grid = Vec::with_capacity(n_theta + domain.intervals().len());
    for &(lo, hi) in domain.intervals() {
        let len = hi - lo;
        let m = ((n_theta as f64 * len / total).round() as usize).max(1);
        let step = len / m as f64;
        for i in 0..m {
            grid.push((lo + (i as f64 + 0.5) * step, step));
        }
    }
    grid
}

/// Evaluates the projected energy at every node of a midpoint grid on
/// `domain` and integrates it with the midpoint rule.
pub fn energy_theta_sweep(
    mu: &DiscreteMeasure,
    s: f64,
    domain: &AngleDomain,
    n_theta: usize,
    kernel: Kernel,
) -> Result<SweepReport> {
    check_exponent(s, 0.0, 3.0)?;
    if n_theta < 2 {
        return Err(Error::invalid("n_theta", format!("{n_theta} is below 2")));
    }
    let grid = midpoint_grid(domain, n_theta);
    let mut thetas = Vec::with_capacity(grid.len());
    let mut energies = Vec::with_capacity(grid.len());
    let mut weights = Vec::with_capacity(grid.len());
    let mut min_separation = f64::INFINITY;
    for &(theta, weight) in &grid {
        let nu = pushforward_projection(mu, Angle::new(theta)?);
        let e = discrete_energy_detailed(&nu, s, kernel).map_err(|e| e.at_angle(theta))?;
        thetas.push(theta);
        energies.push(e.energy);
        weights.push(weight);
        min_separation = min_separation.min(e.min_separation);
    }
    let terms: Vec<f64> = energies.iter().zip(&weights).map(|(e, w)| e * w).collect();
    Ok(SweepReport {
        s,
        kernel,
        thetas,
        energies,
        weights,
        domain: domain.clone(),
        integral: pairwise_sum(&terms),
        n_points: mu.len(),
        min_separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{excluded_domain, Modulus};
    use crate::heisenberg::HPoint;
    use crate::measures::MeasureMeta;
    use std::f64::consts::PI;

    #[test]
    fn grid_covers_domain() {
        let d = excluded_domain(Angle::new(0.0).unwrap(), 0.1, Modulus::Four).unwrap();
        let g = midpoint_grid(&d, 64);
        let len: f64 = g.iter().map(|x| x.1).sum();
        assert!((len - d.total_length()).abs() < 1e-13);
        assert!(g.iter().all(|(t, _)| d.contains(*t)));
    }

    #[test]
    fn two_points_give_finite_energies() {
        let pts = vec![HPoint::new(0.0, 0.0, 0.0), HPoint::new(0.0, 0.0, 1.0)];
        let mu = DiscreteMeasure::uniform(pts, MeasureMeta::new("pair")).unwrap();
        let r = energy_theta_sweep(&mu, 1.0, &AngleDomain::full(), 16, Kernel::Koranyi).unwrap();
        // Vertical separation 1 projects to Korányi distance 2 at every angle.
        for e in &r.energies {
            assert!((e - 0.25).abs() < 1e-15);
        }
        assert!((r.integral - 0.25 * PI).abs() < 1e-14);
    }

    #[test]
    fn degenerate_projection_reports_angle() {
        let d = AngleDomain::new(vec![(0.4, 0.6)]).unwrap();
        let theta = midpoint_grid(&d, 2)[0].0;
        let e = Angle::new(theta).unwrap().direction();
        // A horizontal offset along e^{iθ} is erased by the projection at θ.
        let pts = vec![HPoint::ORIGIN, HPoint::new(e.x, e.y, 0.0)];
        let mu = DiscreteMeasure::uniform(pts, MeasureMeta::new("pair")).unwrap();
        match energy_theta_sweep(&mu, 1.0, &d, 2, Kernel::Koranyi).unwrap_err() {
            Error::AtAngle { theta: at, source } => {
                assert_eq!(at, theta);
                assert!(matches!(*source, Error::DegeneratePair { i: 0, j: 1 }));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
