use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::AxisRule;

use super::{check_exponent, fs_unchecked};

/// Largest number of resolution cells per axis.
pub const MAX_CELLS: f64 = 8192.0;

/// `∫_0^1 √(1 − x⁴) dx`, the area of the unit quadrant ball `{x⁴ + t² ≤ 1}`.
pub(crate) const QUADRANT_BALL_AREA: f64 = 0.874_019_184_764_04;

/// Truncated spatial grid: `[-T, T]²` at resolution `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierGrid {
    pub extent: f64,
    pub resolution: f64,
}

impl Default for FourierGrid {
    fn default() -> Self {
        FourierGrid {
            extent: 64.0,
            resolution: 1.0 / 64.0,
        }
    }
}

impl FourierGrid {
    pub fn new(extent: f64, resolution: f64) -> Result<Self> {
        let g = FourierGrid { extent, resolution };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.extent.is_finite()) {
            return Err(Error::invalid("h", format!("{} is not positive", self.resolution)));
        }
        let cells = self.extent / self.resolution;
        if !(cells >= 16.0) {
            return Err(Error::invalid("T", format!("T/h = {cells} is below 16")));
        }
        if cells > MAX_CELLS {
            return Err(Error::invalid("T", format!("T/h = {cells} exceeds {MAX_CELLS}")));
        }
        Ok(())
    }

    /// Frequencies whose largest component lies in `[1/T, 1/(4h)]` are trusted.
    pub fn band(&self) -> (f64, f64) {
        (1.0 / self.extent, 0.25 / self.resolution)
    }

    pub fn check_frequency(&self, xi1: f64, xi2: f64) -> Result<()> {
        let (lo, hi) = self.band();
        let m = xi1.abs().max(xi2.abs());
        // Small slack so band edges computed in floating point are accepted.
        if m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::FrequencyOutOfBand { xi1, xi2, lo, hi })
        }
    }

    fn window(&self, u: f64) -> f64 {
        let sigma = self.extent / 3.0;
        (-(u / sigma) * (u / sigma)).exp()
    }
}

/// Composite rule on `[0, T]`: one corner interval at the origin, dyadic
/// grading up to `4h`, then uniform cells of width `h`.
struct AxisMesh {
    rule: AxisRule,
    /// Number of leading nodes that belong to the corner interval.
    corner: usize,
    corner_width: f64,
}

const GRADED_ORDER: usize = 6;
const CELL_ORDER: usize = 2;

fn axis_mesh(grid: &FourierGrid, min_width: f64) -> AxisMesh {
    let g = 4.0 * grid.resolution;
    let levels = (g / min_width).log2().ceil().max(1.0) as u32;
    let corner_width = g * 0.5f64.powi(levels as i32);
    let mut rule = AxisRule::new();
    rule.push_interval(0.0, corner_width, GRADED_ORDER);
    let corner = rule.len();
    let mut lo = corner_width;
    for _ in 0..levels {
        rule.push_interval(lo, 2.0 * lo, GRADED_ORDER);
        lo *= 2.0;
    }
    rule.push_uniform(g, grid.extent, grid.resolution, CELL_ORDER);
    AxisMesh {
        rule,
        corner,
        corner_width,
    }
}

/// Bound on `∫ f_s` over the quadrant ball of radius `r`: `3A r^{3-s}/(3-s)`.
fn ball_integral_bound(r: f64, s: f64) -> f64 {
    3.0 * QUADRANT_BALL_AREA * r.powf(3.0 - s) / (3.0 - s)
}

/// Windowed transform of `f_s` on a tensor grid of frequencies.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    /// Row-major values, `values[i * xi2.len() + k]` at `(xi1[i], xi2[k])`.
    pub values: Vec<f64>,
    /// Upper bound on the magnitude of the excluded singular-cell contribution.
    pub singular_bound: f64,
}

impl TransformGrid {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.xi2.len() + k]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Computes `4 ∫∫_{[0,T]²} f_s(x,t) w(x) w(t) cos(2πxξ₁) cos(2πtξ₂) dx dt`
/// for every pair in `xi1 × xi2`, where `w` is a Gaussian taper of width
/// `T/3`. The cell `[0, x₀] × [0, t₀]` at the singularity is left out; its
/// contribution is bounded by `singular_bound`.
pub fn fs_transform_grid(s: f64, grid: &FourierGrid, xi1: &[f64], xi2: &[f64]) -> Result<TransformGrid> {
    check_exponent(s, 1.0, 3.0)?;
    grid.validate()?;
    // Choose the excluded cell so its bound is negligible (clamped for s near 3).
    let target = 1e-10;
    let radius = (target * (3.0 - s) / (12.0 * QUADRANT_BALL_AREA))
        .powf(1.0 / (3.0 - s))
        .max(1e-120);
    let xm = axis_mesh(grid, 0.8 * radius);
    let tm = axis_mesh(grid, (0.8 * radius).powi(2));
    let corner_r = (xm.corner_width.powi(4) + tm.corner_width.powi(2)).powf(0.25);
    let singular_bound = 4.0 * ball_integral_bound(corner_r, s);

    let wx: Vec<f64> = xm.rule.nodes.iter().zip(&xm.rule.weights).map(|(&x, &w)| w * grid.window(x)).collect();
    let wt: Vec<f64> = tm.rule.nodes.iter().zip(&tm.rule.weights).map(|(&t, &w)| w * grid.window(t)).collect();
    let cos_t: Vec<Vec<f64>> = xi2
        .iter()
        .map(|&k| {
            tm.rule
                .nodes
                .iter()
                .zip(&wt)
                .map(|(&t, &w)| w * (2.0 * PI * t * k.abs()).cos())
                .collect()
        })
        .collect();

    let rows: Vec<Vec<f64>> = xm
        .rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(a, &x)| {
            let start = if a < xm.corner { tm.corner } else { 0 };
            let f: Vec<f64> = tm.rule.nodes[start..].iter().map(|&t| fs_unchecked(x, t, s)).collect();
            cos_t.iter().map(|c| dot(&c[start..], &f)).collect()
        })
        .collect();

    let n2 = xi2.len();
    let values: Vec<f64> = xi1
        .par_iter()
        .flat_map_iter(|&k1| {
            let mut acc = vec![0.0; n2];
            for ((&x, &w), row) in xm.rule.nodes.iter().zip(&wx).zip(&rows) {
                let c = w * (2.0 * PI * x * k1.abs()).cos();
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += c * r;
                }
            }
            acc.into_iter().map(|v| 4.0 * v)
        })
        .collect();

    Ok(TransformGrid {
        xi1: xi1.to_vec(),
        xi2: xi2.to_vec(),
        values,
        singular_bound,
    })
}

/// One checked frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSample {
    pub xi1: f64,
    pub xi2: f64,
    pub value: f64,
    /// `value` minus the singular-cell bound; positive means certified positive.
    pub positivity_margin: f64,
    /// `f_{3-s}(ξ)`.
    pub reference: f64,
    /// `value / f_{3-s}(ξ)`.
    pub ratio: f64,
}

/// Outcome of [`fourier_fs_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierReport {
    pub s: f64,
    pub grid: FourierGrid,
    pub band: (f64, f64),
    pub singular_cell_bound: f64,
    /// Fitted constant: the largest ratio over the samples.
    pub constant: f64,
    pub min_ratio: f64,
    /// Largest max/min ratio along any anisotropic ray `(λξ₁, λ²ξ₂)`; the
    /// exact transform is constant along rays.
    pub ray_spread: f64,
    pub tolerance: f64,
    pub positivity_violations: usize,
    pub ratio_violations: usize,
    pub samples: Vec<FourierSample>,
}

impl FourierReport {
    pub fn passed(&self) -> bool {
        self.positivity_violations == 0 && self.ratio_violations == 0 && self.constant.is_finite()
    }
}

/// Default frequency samples: `n_dir` anisotropic directions from the `ξ₁`
/// axis to the `ξ₂` axis, each at `n_rad` geometric radii inside the band.
pub fn band_samples(grid: &FourierGrid, n_dir: usize, n_rad: usize) -> Vec<[f64; 2]> {
    let (lo, hi) = grid.band();
    // Keep ρ² well above the frequency resolution 1/T so the taper is negligible.
    let rho_lo = (32.0 * lo).sqrt().min(hi.sqrt());
    let rho_hi = hi.sqrt();
    let mut out = Vec::with_capacity(n_dir * n_rad);
    for d in 0..n_dir {
        let phi = if n_dir == 1 { 0.0 } else { 0.5 * PI * d as f64 / (n_dir - 1) as f64 };
        for r in 0..n_rad {
            let frac = if n_rad == 1 { 0.0 } else { r as f64 / (n_rad - 1) as f64 };
            let rho = rho_lo * (rho_hi / rho_lo).powf(frac);
            let xi1 = rho * phi.cos().max(0.0).sqrt();
            let xi2 = rho * rho * phi.sin();
            out.push([xi1, xi2]);
        }
    }
    out
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.map(f64::abs).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Checks positivity of the transform of `f_s` and the bound
/// `f̂_s ≤ C_s f_{3-s}` on the given frequencies.
pub fn fourier_fs_check(s: f64, grid: &FourierGrid, freq_samples: &[[f64; 2]]) -> Result<FourierReport> {
    check_exponent(s, 1.0, 3.0)?;
    grid.validate()?;
    if freq_samples.is_empty() {
        return Err(Error::invalid("freq_samples", "no frequencies given"));
    }
    for &[a, b] in freq_samples {
        grid.check_frequency(a, b)?;
    }
    let xi1 = distinct(freq_samples.iter().map(|p| p[0]));
    let xi2 = distinct(freq_samples.iter().map(|p| p[1]));
    let table = fs_transform_grid(s, grid, &xi1, &xi2)?;
    let find = |v: &[f64], x: f64| v.binary_search_by(|p| p.total_cmp(&x.abs())).expect("frequency present");

    let mut samples = Vec::with_capacity(freq_samples.len());
    for &[a, b] in freq_samples {
        let value = table.at(find(&xi1, a), find(&xi2, b));
        let reference = fs_unchecked(a, b, 3.0 - s);
        samples.push(FourierSample {
            xi1: a,
            xi2: b,
            value,
            positivity_margin: value - table.singular_bound,
            reference,
            ratio: value / reference,
        });
    }

    // Group samples by anisotropic direction to measure ray consistency.
    let mut rays: BTreeMap<(i64, i64), (f64, f64)> = BTreeMap::new();
    for smp in &samples {
        let rho = (smp.xi1.powi(4) + smp.xi2 * smp.xi2).powf(0.25);
        let key = ((smp.xi1 / rho * 1e9).round() as i64, (smp.xi2 / (rho * rho) * 1e9).round() as i64);
        let e = rays.entry(key).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(smp.ratio);
        e.1 = e.1.max(smp.ratio);
    }
    let tolerance = 0.25;
    let spreads: Vec<f64> = rays.values().map(|(lo, hi)| hi / lo).collect();
    let ray_spread = spreads.iter().copied().fold(1.0, f64::max);
    let ratio_violations = spreads.iter().filter(|&&x| !(x <= 1.0 + tolerance)).count();
    let positivity_violations = samples.iter().filter(|x| !(x.positivity_margin > 0.0)).count();
    let constant = samples.iter().map(|x| x.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = samples.iter().map(|x| x.ratio).fold(f64::INFINITY, f64::min);

    Ok(FourierReport {
        s,
        grid: *grid,
        band: grid.band(),
        singular_cell_bound: table.singular_bound,
        constant,
        min_ratio,
        ray_spread,
        tolerance,
        positivity_violations,
        ratio_violations,
        samples,
    })
}
