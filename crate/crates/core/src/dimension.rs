//! Anisotropic box counting (`δ × δ × δ²` boxes) and log-log dimension
//! regression.
//!
//! Box dimension bounds Hausdorff dimension from above; for the
//! self-similar and smooth-curve sets generated in this crate they agree.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{dh, plane_distance, Angle, HPoint, PlanarPoint};
use crate::measures::{pushforward_projection, DiscreteMeasure};

/// Occupied boxes `[kδ, (k+1)δ) × [mδ, (m+1)δ) × [nδ², (n+1)δ²)`.
pub fn box_count_h(points: &[HPoint], delta: f64) -> usize {
    let d2 = delta * delta;
    let mut keys: Vec<(i64, i64, i64)> = points
        .par_iter()
        .map(|p| ((p.x / delta).floor() as i64, (p.y / delta).floor() as i64, (p.t / d2).floor() as i64))
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    keys.len()
}

/// Occupied boxes `[kδ, (k+1)δ) × [nδ², (n+1)δ²)` in plane coordinates.
pub fn box_count_plane(points: &[PlanarPoint], delta: f64) -> usize {
    let d2 = delta * delta;
    let mut keys: Vec<(i64, i64)> = points
        .par_iter()
        .map(|p| ((p.v / delta).floor() as i64, (p.t / d2).floor() as i64))
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    keys.len()
}

/// A point cloud that can be box-counted.
pub trait BoxCounter {
    fn count(&self, delta: f64) -> usize;
    fn n_points(&self) -> usize;
    /// Median nearest-neighbour Korányi distance, estimated on a strided
    /// subsample of at most 512 query points.
    fn spacing(&self) -> f64;
}

const SPACING_QUERIES: usize = 512;

fn median_nn<T: Copy + Sync>(pts: &[T], dist: impl Fn(T, T) -> f64 + Sync) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let stride = pts.len().div_ceil(SPACING_QUERIES);
    let mut nn: Vec<f64> = (0..pts.len())
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            pts.iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &q)| dist(pts[i], q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2]
}

/// Points in the group.
pub struct HCloud<'a>(pub &'a [HPoint]);

impl BoxCounter for HCloud<'_> {
    fn count(&self, delta: f64) -> usize {
        box_count_h(self.0, delta)
    }
    fn n_points(&self) -> usize {
        self.0.len()
    }
    fn spacing(&self) -> f64 {
        median_nn(self.0, dh)
    }
}

/// Points in vertical-plane coordinates.
pub struct PlaneCloud<'a>(pub &'a [PlanarPoint]);

impl BoxCounter for PlaneCloud<'_> {
    fn count(&self, delta: f64) -> usize {
        box_count_plane(self.0, delta)
    }
    fn n_points(&self) -> usize {
        self.0.len()
    }
    fn spacing(&self) -> f64 {
        median_nn(self.0, plane_distance)
    }
}

/// Diagnostics attached to a [`DimensionEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFlags {
    /// No scale passed the guards; the fit used every scale and is a floor/ceiling artefact.
    pub saturated: bool,
    /// Median nearest-neighbour spacing of the cloud.
    pub spacing: f64,
    /// Scales left out of the fit (count above `n/4` or `δ` below the spacing).
    pub excluded: Vec<f64>,
    /// Fitted scales with `δ` below four times the spacing.
    pub below_resolution: Vec<f64>,
}

/// Least-squares fit of `log N(δ)` against `log(1/δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Scales, largest first.
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub r2: f64,
    /// `[δ_min, δ_max]` of the scales used in the fit.
    pub window: (f64, f64),
    pub flags: DimensionFlags,
}

fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss_tot: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - ym - slope * (x - xm)).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, r2)
}

/// Box-counting dimension over the scales that the cloud resolves.
///
/// A scale is used when its count is at most `n/4` and `δ` is at least the
/// median nearest-neighbour spacing. When nothing survives (e.g. every scale
/// is below the spacing) all scales are fitted and the result is flagged as
/// saturated; otherwise fewer than three usable scales is an error.
pub fn dim_estimate(counter: &impl BoxCounter, deltas: &[f64]) -> Result<DimensionEstimate> {
    if deltas.len() < 4 {
        return Err(Error::invalid("deltas", format!("need at least 4 scales, got {}", deltas.len())));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::invalid("deltas", "scales must be positive"));
    }
    let mut deltas = deltas.to_vec();
    deltas.sort_by(|a, b| b.total_cmp(a));
    deltas.dedup();
    let counts: Vec<usize> = deltas.iter().map(|&d| counter.count(d)).collect();
    let n = counter.n_points();
    let spacing = counter.spacing();

    let usable: Vec<bool> = deltas
        .iter()
        .zip(&counts)
        .map(|(&d, &c)| 4 * c <= n && d >= spacing)
        .collect();
    let n_usable = usable.iter().filter(|&&u| u).count();
    let saturated = n_usable == 0;
    if !saturated && n_usable < 3 {
        return Err(Error::InsufficientScales { usable: n_usable });
    }
    let chosen: Vec<usize> = (0..deltas.len()).filter(|&i| saturated || usable[i]).collect();
    let xs: Vec<f64> = chosen.iter().map(|&i| -deltas[i].ln()).collect();
    let ys: Vec<f64> = chosen.iter().map(|&i| (counts[i] as f64).ln()).collect();
    let (slope, r2) = fit(&xs, &ys);
    let used: Vec<f64> = chosen.iter().map(|&i| deltas[i]).collect();
    let window = (
        used.iter().copied().fold(f64::INFINITY, f64::min),
        used.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(DimensionEstimate {
        flags: DimensionFlags {
            saturated,
            spacing,
            excluded: (0..deltas.len()).filter(|&i| !usable[i]).map(|i| deltas[i]).collect(),
            below_resolution: used.iter().copied().filter(|&d| d < 4.0 * spacing).collect(),
        },
        deltas,
        counts,
        slope,
        r2,
        window,
    })
}

/// Dimension estimate of the projected support at each angle.
pub fn projected_dimension_profile(
    mu: &DiscreteMeasure,
    thetas: &[Angle],
    deltas: &[f64],
) -> Result<Vec<(f64, DimensionEstimate)>> {
    thetas
        .iter()
        .map(|&theta| {
            let nu = pushforward_projection(mu, theta);
            let est = dim_estimate(&PlaneCloud(nu.points()), deltas).map_err(|e| e.at_angle(theta.radians()))?;
            Ok((theta.radians(), est))
        })
        .collect()
}
