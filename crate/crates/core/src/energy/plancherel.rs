use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::PlanarMeasure;
use crate::quadrature::AxisRule;
use crate::reduce::pairwise_sum;

use super::fourier::{fs_transform_grid, FourierGrid};
use super::{check_exponent, fs_unchecked};

/// A planar measure smeared uniformly over square bins of side `width`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMeasure {
    pub width: f64,
    /// `(bin index (i, k), mass)` sorted by index; bin `(i, k)` is
    /// `[i h, (i+1) h) × [k h, (k+1) h)`.
    pub bins: Vec<((i64, i64), f64)>,
}

impl BinnedMeasure {
    pub fn mass(&self) -> f64 {
        let m: Vec<f64> = self.bins.iter().map(|b| b.1).collect();
        pairwise_sum(&m)
    }

    fn center(&self, key: (i64, i64)) -> (f64, f64) {
        ((key.0 as f64 + 0.5) * self.width, (key.1 as f64 + 0.5) * self.width)
    }

    pub fn scale_mass(&self, c: f64) -> BinnedMeasure {
        BinnedMeasure {
            width: self.width,
            bins: self.bins.iter().map(|&(k, m)| (k, c * m)).collect(),
        }
    }
}

/// Spreads every atom of `nu` over the bin containing it.
pub fn bin_measure(nu: &PlanarMeasure, width: f64) -> Result<BinnedMeasure> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::AtomicInput);
    }
    let mut bins: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (p, &w) in nu.points().iter().zip(nu.weights()) {
        let key = ((p.v / width).floor() as i64, (p.t / width).floor() as i64);
        *bins.entry(key).or_insert(0.0) += w;
    }
    Ok(BinnedMeasure {
        width,
        bins: bins.into_iter().collect(),
    })
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// `∫ e^{2πi ξ·x} dν(x)` for the binned (piecewise-constant) measure.
pub fn inverse_fourier(nu: &BinnedMeasure, xi1: f64, xi2: f64) -> (f64, f64) {
    let mut re = Vec::with_capacity(nu.bins.len());
    let mut im = Vec::with_capacity(nu.bins.len());
    for &(key, m) in &nu.bins {
        let (cx, ct) = nu.center(key);
        let (s, c) = (2.0 * PI * (xi1 * cx + xi2 * ct)).sin_cos();
        re.push(m * c);
        im.push(m * s);
    }
    let box_ft = sinc(nu.width * xi1) * sinc(nu.width * xi2);
    (box_ft * pairwise_sum(&re), box_ft * pairwise_sum(&im))
}

/// Grid conventions for [`plancherel_check_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlancherelOptions {
    /// Spatial truncation `T` of the transform of `f_s`; resolution is the bin width.
    pub extent: f64,
    /// Frequency cell width away from the origin.
    pub freq_step: f64,
}

impl PlancherelOptions {
    /// `T = min(64, 2048 h)` and a frequency step resolving the support diameter.
    pub fn for_measure(nu: &BinnedMeasure) -> Self {
        let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for &((i, k), _) in &nu.bins {
            lo = (lo.0.min(i), lo.1.min(k));
            hi = (hi.0.max(i), hi.1.max(k));
        }
        let diameter = ((hi.0 - lo.0).max(hi.1 - lo.1) + 1) as f64 * nu.width;
        PlancherelOptions {
            extent: (2048.0 * nu.width).min(64.0),
            freq_step: (1.0 / (8.0 * diameter)).min(1.0 / 16.0),
        }
    }
}

/// Both sides of the energy–Fourier comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlancherelReport {
    pub s: f64,
    pub bin_width: f64,
    pub bins: usize,
    pub mass: f64,
    /// `∫ f_s d(ι#ν ∗ ν)` over all nonzero bin lags.
    pub lhs: f64,
    /// Contribution of the zero lag, left out of `lhs`.
    pub self_term: f64,
    /// `∫ f̂_s |ν̌|²` over the reliable frequency band.
    pub rhs: f64,
    pub band: (f64, f64),
    pub options: PlancherelOptions,
}

impl PlancherelReport {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Gauss nodes on `[c - h, c + h]` weighted by the tent `(h - |y - c|)/h²`,
/// graded toward zero when zero lies in the support.
fn tent_axis(c: f64, h: f64, levels: u32) -> AxisRule {
    let mut cuts = vec![c - h, c, c + h];
    if c - h < 0.0 && 0.0 < c + h && c != 0.0 {
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
    }
    let mut raw = AxisRule::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == 0.0 {
            raw.push_graded_from_zero(b, levels, 6);
        } else if b == 0.0 {
            let mut mirrored = AxisRule::new();
            mirrored.push_graded_from_zero(-a, levels, 6);
            raw.nodes.extend(mirrored.nodes.iter().map(|x| -x));
            raw.weights.extend(mirrored.weights);
        } else {
            raw.push_interval(a, b, 6);
        }
    }
    let weights = raw
        .nodes
        .iter()
        .zip(&raw.weights)
        .map(|(&y, &w)| w * (h - (y - c).abs()).max(0.0) / (h * h))
        .collect();
    AxisRule {
        nodes: raw.nodes,
        weights,
    }
}

/// Average of `f_s` over the difference of two bins at lag `(i, k)`.
fn lag_kernel(i: i64, k: i64, h: f64, s: f64) -> f64 {
    let xs = tent_axis(i as f64 * h, h, 50);
    let ts = tent_axis(k as f64 * h, h, 100);
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, &wx) in xs.nodes.iter().zip(&xs.weights) {
        let mut acc = 0.0;
        for (&t, &wt) in ts.nodes.iter().zip(&ts.weights) {
            acc += wt * fs_unchecked(x, t, s);
        }
        rows.push(wx * acc);
    }
    pairwise_sum(&rows)
}

/// Frequency axis on `[0, hi]`: the sub-band cell `[0, lo]`, geometric cells
/// growing from `lo` up to `step`, then uniform cells of width `step`.
fn frequency_axis(lo: f64, hi: f64, step: f64) -> (AxisRule, usize) {
    let mut rule = AxisRule::new();
    rule.push_interval(0.0, lo, 2);
    let corner = rule.len();
    let mut a = lo;
    let mut w = lo;
    while w < step && a + w < hi {
        rule.push_interval(a, a + w, 2);
        a += w;
        w *= 2.0;
    }
    rule.push_uniform(a, hi, step, 2);
    (rule, corner)
}

/// [`plancherel_check_with`] using [`PlancherelOptions::for_measure`].
pub fn plancherel_check(nu: &PlanarMeasure, bin_width: f64, s: f64) -> Result<PlancherelReport> {
    let binned = bin_measure(nu, bin_width)?;
    let opts = PlancherelOptions::for_measure(&binned);
    plancherel_check_with(&binned, s, opts)
}

/// Compares the off-origin energy of a binned measure with the band-limited
/// frequency-side integral `∫ f̂_s |ν̌|²`.
pub fn plancherel_check_with(nu: &BinnedMeasure, s: f64, opts: PlancherelOptions) -> Result<PlancherelReport> {
    check_exponent(s, 1.0, 3.0)?;
    let h = nu.width;
    let grid = FourierGrid::new(opts.extent, h)?;

    // Mass autocorrelation over bin lags.
    let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
    for &((i, k), _) in &nu.bins {
        lo = (lo.0.min(i), lo.1.min(k));
        hi = (hi.0.max(i), hi.1.max(k));
    }
    let (wi, wk) = (hi.0 - lo.0, hi.1 - lo.1);
    let (ni, nk) = ((2 * wi + 1) as usize, (2 * wk + 1) as usize);
    if ni.saturating_mul(nk) > 1 << 24 {
        return Err(Error::invalid("bin_width", "measure spans too many bins"));
    }
    let mut auto = vec![0.0; ni * nk];
    for &((i1, k1), m1) in &nu.bins {
        for &((i2, k2), m2) in &nu.bins {
            let li = (i2 - i1 + wi) as usize;
            let lk = (k2 - k1 + wk) as usize;
            auto[li * nk + lk] += m1 * m2;
        }
    }
    let lags: Vec<(i64, i64, f64)> = auto
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(idx, &a)| ((idx / nk) as i64 - wi, (idx % nk) as i64 - wk, a))
        .collect();
    let terms: Vec<f64> = lags
        .par_iter()
        .map(|&(i, k, a)| if i == 0 && k == 0 { 0.0 } else { a * lag_kernel(i, k, h, s) })
        .collect();
    let lhs = pairwise_sum(&terms);
    let self_term = auto[(wi as usize) * nk + wk as usize] * lag_kernel(0, 0, h, s);

    // Frequency side on the band, using evenness of f̂ and |ν̌(-ξ)| = |ν̌(ξ)|.
    let band = grid.band();
    let (axis, corner) = frequency_axis(band.0, band.1, opts.freq_step);
    let fhat = fs_transform_grid(s, &grid, &axis.nodes, &axis.nodes)?;
    let n = axis.len();

    let mut rows: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    for &((i, k), m) in &nu.bins {
        let (cx, _) = nu.center((i, k));
        rows.entry(k).or_default().push((cx, m));
    }
    let row_keys: Vec<i64> = rows.keys().copied().collect();
    // partial[r][a] = Σ_{bins in row r} m e^{2πi ξ₁(a) c_x}
    let partial: Vec<Vec<(f64, f64)>> = rows
        .values()
        .map(|row| {
            axis.nodes
                .iter()
                .map(|&x1| {
                    row.iter().fold((0.0, 0.0), |acc, &(cx, m)| {
                        let (sn, cs) = (2.0 * PI * x1 * cx).sin_cos();
                        (acc.0 + m * cs, acc.1 + m * sn)
                    })
                })
                .collect()
        })
        .collect();
    let phases: Vec<Vec<(f64, f64)>> = axis
        .nodes
        .iter()
        .map(|&x2| {
            row_keys
                .iter()
                .map(|&k| {
                    let ct = (k as f64 + 0.5) * h;
                    let (sn, cs) = (2.0 * PI * x2 * ct).sin_cos();
                    (cs, sn)
                })
                .collect()
        })
        .collect();

    let rhs_rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let box1 = sinc(h * axis.nodes[a]);
            let mut acc = 0.0;
            for b in 0..n {
                if a < corner && b < corner {
                    continue;
                }
                let box2 = sinc(h * axis.nodes[b]);
                let (mut pr, mut pi, mut mr, mut mi) = (0.0, 0.0, 0.0, 0.0);
                for (r, &(er, ei)) in phases[b].iter().enumerate() {
                    let (sr, si) = partial[r][a];
                    // (sr + i si)(er ± i ei)
                    pr += sr * er - si * ei;
                    pi += sr * ei + si * er;
                    mr += sr * er + si * ei;
                    mi += si * er - sr * ei;
                }
                let amp = (box1 * box2).powi(2) * (pr * pr + pi * pi + mr * mr + mi * mi);
                acc += axis.weights[b] * fhat.at(a, b) * amp;
            }
            2.0 * axis.weights[a] * acc
        })
        .collect();
    let rhs = pairwise_sum(&rhs_rows);

    Ok(PlancherelReport {
        s,
        bin_width: h,
        bins: nu.bins.len(),
        mass: nu.mass(),
        lhs,
        self_term,
        rhs,
        band,
        options: opts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::PlanarPoint;

    #[test]
    fn tent_axis_integrates_tent() {
        for c in [0.0, 0.1, -0.1, 0.5] {
            let axis = tent_axis(c, 0.1, 30);
            let total: f64 = axis.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "c = {c}: {total}");
        }
    }

    #[test]
    fn zero_frequency_is_mass() {
        let pts = vec![PlanarPoint::new(0.1, 0.2), PlanarPoint::new(-0.3, 0.7)];
        let nu = PlanarMeasure::new(pts, vec![0.25, 0.5]).unwrap();
        let b = bin_measure(&nu, 0.05).unwrap();
        let (re, im) = inverse_fourier(&b, 0.0, 0.0);
        assert!((re - 0.75).abs() < 1e-15 && im == 0.0);
    }

    #[test]
    fn atoms_rejected() {
        let nu = PlanarMeasure::new(vec![PlanarPoint::new(0.0, 0.0)], vec![1.0]).unwrap();
        assert!(matches!(plancherel_check(&nu, 0.0, 2.0), Err(Error::AtomicInput)));
    }

    #[test]
    fn lag_kernel_matches_direct_average_far_away() {
        // Far from the singularity the tent average is close to the point value.
        let h = 1.0 / 32.0;
        let k = lag_kernel(40, 20, h, 2.0);
        let direct = fs_unchecked(40.0 * h, 20.0 * h, 2.0);
        assert!((k / direct - 1.0).abs() < 1e-2);
    }
}
