//! The phase `F(θ)` of a point pair, Dirichlet kernels, sublevel sets of the
//! phase and the dyadic triple integral built from them.

mod cover;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::AngleDomain;
use crate::error::{Error, Result};
use crate::heisenberg::{omega, planar_proj, Angle, HPoint, Vec2};
use crate::measures::DiscreteMeasure;
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::reduce::pairwise_sum;

pub use cover::cylinder_ball_cover_count;

/// Largest supported dyadic frequency index.
pub const MAX_J: u32 = 12;

/// An ordered pair of points `p = (z, t)`, `q = (ζ, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPair {
    pub p: HPoint,
    pub q: HPoint,
}

impl PointPair {
    pub fn new(p: HPoint, q: HPoint) -> Self {
        PointPair { p, q }
    }

    /// `z − ζ`.
    pub fn diff(&self) -> Vec2 {
        self.p.z() - self.q.z()
    }

    /// `z + ζ`.
    pub fn sum(&self) -> Vec2 {
        self.p.z() + self.q.z()
    }

    /// Dyadic index with `|z − ζ| ∈ [2^{-ℓ-1}, 2^{-ℓ})`; `None` when `z = ζ`.
    /// An exact power of two `2^{-k}` gets the smaller index `k − 1`.
    pub fn ell(&self) -> Option<i64> {
        let d = self.diff().norm();
        if d == 0.0 {
            None
        } else {
            Some((-d.log2()).ceil() as i64 - 1)
        }
    }

    /// Horizontal scale `(|z| + |ζ|)/2`.
    pub fn radius(&self) -> f64 {
        0.5 * (self.p.z().norm() + self.q.z().norm())
    }

    pub fn swapped(&self) -> Self {
        PointPair::new(self.q, self.p)
    }
}

/// `⟨z, e^{iθ}⟩⟨z, ie^{iθ}⟩ = ω(π_{V_θ}(z), z)`.
#[inline]
fn twist(e: Vec2, ie: Vec2, z: Vec2) -> f64 {
    z.dot(e) * z.dot(ie)
}

/// `F(θ) = t − τ + ω(π_{V_θ}(z), z)/2 − ω(π_{V_θ}(ζ), ζ)/2`, the difference of the
/// vertical coordinates of the two projected points.
pub fn phase_f(theta: Angle, pair: &PointPair) -> f64 {
    let (e, ie) = (theta.direction(), theta.normal());
    pair.p.t - pair.q.t + 0.5 * (twist(e, ie, pair.p.z()) - twist(e, ie, pair.q.z()))
}

/// The same phase written as `t − τ + ω(z, ζ)/2 − ω(π_{V_θ⊥}(z − ζ), z + ζ)/2`.
pub fn phase_f_alt(theta: Angle, pair: &PointPair) -> f64 {
    let (_, perp) = planar_proj(theta, pair.diff());
    pair.p.t - pair.q.t + 0.5 * omega(pair.p.z(), pair.q.z()) - 0.5 * omega(perp, pair.sum())
}

/// `F′(θ) = ½(⟨d, ie^{iθ}⟩⟨S, ie^{iθ}⟩ − ⟨d, e^{iθ}⟩⟨S, e^{iθ}⟩)` with
/// `d = z − ζ`, `S = z + ζ`; defined for every pair.
fn phase_f_prime_raw(theta: f64, d: Vec2, s: Vec2) -> f64 {
    let (sn, cs) = theta.sin_cos();
    let e = Vec2::new(cs, sn);
    let ie = Vec2::new(-sn, cs);
    0.5 * (d.dot(ie) * s.dot(ie) - d.dot(e) * s.dot(e))
}

/// `F′(θ) = ½|z−ζ||z+ζ| · d/dθ(⟨p̂, e^{iθ}⟩⟨q̂, ie^{iθ}⟩)` with unit vectors
/// `p̂ = (z−ζ)/|z−ζ|`, `q̂ = (z+ζ)/|z+ζ|`.
pub fn phase_f_prime(theta: Angle, pair: &PointPair) -> Result<f64> {
    let (d, s) = (pair.diff(), pair.sum());
    let (nd, ns) = (d.norm(), s.norm());
    if nd == 0.0 || ns == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let (p_hat, q_hat) = ((1.0 / nd) * d, (1.0 / ns) * s);
    let (e, ie) = (theta.direction(), theta.normal());
    let derivative = p_hat.dot(ie) * q_hat.dot(ie) - p_hat.dot(e) * q_hat.dot(e);
    Ok(0.5 * nd * ns * derivative)
}

/// `∫_{-L}^{L} e^{2πirc} dr = sin(2πLc)/(πc)`, equal to `2L` at `c = 0`.
pub fn dirichlet(c: f64, l: f64) -> f64 {
    let x = 2.0 * std::f64::consts::PI * l * c;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        2.0 * l * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    } else {
        x.sin() / (std::f64::consts::PI * c)
    }
}

/// Pair data precomputed for repeated evaluation in θ.
///
/// With `a = ⟨z, e⟩`, `b = ⟨z, ie⟩` one has `ab = xy·cos 2θ + (y² − x²)/2·sin 2θ`,
/// so `F` is a trigonometric polynomial of degree two.
#[derive(Clone, Copy)]
struct PhaseData {
    dt: f64,
    cos2: f64,
    sin2: f64,
    d: Vec2,
}

impl PhaseData {
    fn new(pair: &PointPair) -> Self {
        let (z, zeta) = (pair.p.z(), pair.q.z());
        PhaseData {
            dt: pair.p.t - pair.q.t,
            cos2: 0.5 * (z.x * z.y - zeta.x * zeta.y),
            sin2: 0.25 * ((z.y * z.y - z.x * z.x) - (zeta.y * zeta.y - zeta.x * zeta.x)),
            d: pair.diff(),
        }
    }

    /// `(⟨z − ζ, ie⟩, F(θ))`.
    #[inline]
    fn eval(&self, theta: f64) -> (f64, f64) {
        let (sn, cs) = theta.sin_cos();
        let f = self.dt + self.cos2 * (cs * cs - sn * sn) + self.sin2 * (2.0 * sn * cs);
        (self.d.y * cs - self.d.x * sn, f)
    }
}

fn check_j(j: u32) -> Result<()> {
    if j > MAX_J {
        Err(Error::invalid("j", format!("{j} exceeds {MAX_J}")))
    } else {
        Ok(())
    }
}

/// `|∫_domain D(⟨ie^{iθ}, z − ζ⟩, 2^j) · D(F(θ), 2^{2j}) dθ|`, the triple
/// integral over `{|r| ≤ 2^j, |ρ| ≤ 2^{2j}, θ ∈ domain}` after integrating out
/// `r` and `ρ` exactly.
///
/// Panels are cut so each holds at most eight oscillations of the Dirichlet
/// factors, then refined adaptively to relative tolerance `tol`.
pub fn inner_triple_integral(pair: &PointPair, j: u32, domain: &AngleDomain, tol: f64) -> Result<f64> {
    check_j(j)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} is not positive")));
    }
    let (l1, l2) = dyadic_lengths(j);
    let data = PhaseData::new(pair);
    let (panels, cycles) = oscillation_panels(&data, l1, l2, domain, PANEL_CYCLES);
    // The integrand is band-limited on each panel, so the comparison rule
    // already resolves it; a much lower one would force needless bisection.
    let orders = if cycles <= 2.0 {
        (16, 12)
    } else if cycles <= 4.0 {
        (22, 18)
    } else {
        (30, 26)
    };
    let opts = AdaptiveOptions {
        rel_tol: tol,
        abs_floor: 1e-3,
        max_panels: 8 * panels.len() + 10_000,
        orders,
    };
    let est = integrate_adaptive(
        |theta| {
            let (c, f) = data.eval(theta);
            dirichlet(c, l1) * dirichlet(f, l2)
        },
        &panels,
        opts,
    )?;
    Ok(est.value.abs())
}

/// Oscillations of the Dirichlet factors allowed per quadrature panel.
const PANEL_CYCLES: f64 = 8.0;

/// Cuts `domain` into panels holding at most `cycles` oscillations of
/// `sin(2πL₁c)` and `sin(2πL₂F)`.
///
/// With `F = Δt + A cos(2θ − φ)` the local rate is at most
/// `L₁|d| + 2L₂A(|sin(2θ₀ − φ)| + 2|θ − θ₀|)`, so panels widen near the
/// extrema of `F`. Also returns the largest oscillation count of a panel.
fn oscillation_panels(data: &PhaseData, l1: f64, l2: f64, domain: &AngleDomain, cycles: f64) -> (Vec<(f64, f64)>, f64) {
    let amp = data.cos2.hypot(data.sin2);
    let phi = data.sin2.atan2(data.cos2);
    let base = l1 * data.d.norm();
    let slope = 2.0 * l2 * amp;
    let full = cycles / (base + slope);
    let mut panels = Vec::new();
    let mut most: f64 = 0.0;
    for &(lo, hi) in domain.intervals() {
        let mut a = lo;
        while a < hi {
            let b_lin = base + slope * (2.0 * a - phi).sin().abs();
            // Positive root of 2·slope·h² + b_lin·h = cycles.
            let local = 2.0 * cycles / (b_lin + (b_lin * b_lin + 8.0 * slope * cycles).sqrt());
            let step = local.max(full);
            let b = if a + step >= hi || !step.is_finite() { hi } else { a + step };
            let h = b - a;
            most = most.max(h * (b_lin + 2.0 * slope * h).min(base + slope));
            panels.push((a, b));
            a = b;
        }
    }
    (panels, most)
}

/// Outcome of [`lhs_main_inequality_detailed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSum {
    pub value: f64,
    /// Unordered pairs `i ≤ k` integrated by quadrature.
    pub pairs_integrated: usize,
    /// Unordered pairs accounted for by their a-priori bound only.
    pub pairs_bounded: usize,
    /// Summed weighted bound of the bounded pairs; they contribute half of
    /// it to `value`, so the truncation error is at most half of this.
    pub remainder_bound: f64,
}

/// Pairs integrated between two checks of the stopping rule.
const PAIR_CHUNK: usize = 2048;

/// `Σ_{i,k} w_i w_k · inner_triple_integral(p_i, p_k)`, diagonal included.
pub fn lhs_main_inequality(mu: &DiscreteMeasure, j: u32, domain: &AngleDomain, tol: f64) -> Result<f64> {
    lhs_main_inequality_detailed(mu, j, domain, tol).map(|r| r.value)
}

/// As [`lhs_main_inequality`], with bookkeeping.
///
/// Every term is nonnegative and bounded a priori by
/// `∫ min(2L₁, 1/π|c|) · min(2L₂, 1/π|F|) dθ`, which is cheap because it does
/// not oscillate. Unordered pairs are integrated in decreasing order of their
/// weighted bound, in fixed chunks, until the bounds still outstanding sum to
/// at most `tol` times the accumulated value; the rest is added as half its
/// bound. The summand is symmetric in `(i, k)`, so off-diagonal pairs are
/// evaluated once and doubled. The order and chunking do not depend on the
/// thread count.
pub fn lhs_main_inequality_detailed(mu: &DiscreteMeasure, j: u32, domain: &AngleDomain, tol: f64) -> Result<PairSum> {
    check_j(j)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} is not positive")));
    }
    let (l1, l2) = dyadic_lengths(j);
    let pts = mu.points();
    let w = mu.weights();
    let rows: Vec<Result<Vec<(f64, u32, u32)>>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            (i..pts.len())
                .map(|k| {
                    let mult = if k == i { 1.0 } else { 2.0 };
                    let pair = PointPair::new(pts[i], pts[k]);
                    let b = envelope_bound(&pair, l1, l2, domain).map_err(|e| e.at_pair(i, k))?;
                    Ok((mult * w[i] * w[k] * b, i as u32, k as u32))
                })
                .collect()
        })
        .collect();
    let mut order = Vec::with_capacity(pts.len() * (pts.len() + 1) / 2);
    for r in rows {
        order.extend(r?);
    }
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    // outstanding[c] = Σ of the bounds from position c on.
    let mut outstanding = vec![0.0; order.len() + 1];
    for c in (0..order.len()).rev() {
        outstanding[c] = outstanding[c + 1] + order[c].0;
    }

    let mut chunk_sums = Vec::new();
    let mut accumulated = 0.0;
    let mut done = 0;
    while done < order.len() && outstanding[done] > tol * accumulated {
        let end = (done + PAIR_CHUNK).min(order.len());
        let terms: Vec<Result<f64>> = order[done..end]
            .par_iter()
            .map(|&(_, i, k)| {
                let (i, k) = (i as usize, k as usize);
                let mult = if k == i { 1.0 } else { 2.0 };
                let v = inner_triple_integral(&PointPair::new(pts[i], pts[k]), j, domain, tol)
                    .map_err(|e| e.at_pair(i, k))?;
                Ok(mult * w[i] * w[k] * v)
            })
            .collect();
        let terms = terms.into_iter().collect::<Result<Vec<f64>>>()?;
        let sum = pairwise_sum(&terms);
        accumulated += sum;
        chunk_sums.push(sum);
        done = end;
    }
    let remainder = outstanding[done];
    Ok(PairSum {
        value: pairwise_sum(&chunk_sums) + 0.5 * remainder,
        pairs_integrated: done,
        pairs_bounded: order.len() - done,
        remainder_bound: remainder,
    })
}

fn dyadic_lengths(j: u32) -> (f64, f64) {
    let l1 = 2f64.powi(j as i32);
    (l1, l1 * l1)
}

/// Upper bound for the inner integral of a pair: the θ-integral of
/// `min(2L₁, 1/π|c|) · min(2L₂, 1/π|F|)`, with panels broken at the zeros of
/// `c` and the zeros and extrema of `F`, inflated by its quadrature error.
fn envelope_bound(pair: &PointPair, l1: f64, l2: f64, domain: &AngleDomain) -> Result<f64> {
    let data = PhaseData::new(pair);
    let half_pi = 0.5 * PI;
    let mut marks = Vec::new();
    if data.d.norm() > 0.0 {
        // c(θ) = |d| cos(θ − β).
        let beta = (-data.d.x).atan2(data.d.y);
        marks.push((beta + half_pi).rem_euclid(PI));
    }
    // F(θ) = Δt + A cos(2θ − φ).
    let amp = data.cos2.hypot(data.sin2);
    if amp > 0.0 {
        let phi = data.sin2.atan2(data.cos2);
        marks.push((0.5 * phi).rem_euclid(half_pi));
        marks.push((0.5 * phi).rem_euclid(half_pi) + half_pi);
        if data.dt.abs() <= amp {
            let gap = (-data.dt / amp).acos();
            marks.push((0.5 * (phi + gap)).rem_euclid(PI));
            marks.push((0.5 * (phi - gap)).rem_euclid(PI));
        }
    }
    marks.sort_by(f64::total_cmp);
    let mut panels = Vec::new();
    for &(lo, hi) in domain.intervals() {
        let mut a = lo;
        for &m in marks.iter().filter(|&&m| m > lo && m < hi) {
            panels.push((a, m));
            a = m;
        }
        panels.push((a, hi));
    }
    let cap = |x: f64, l: f64| (2.0 * l).min(1.0 / (PI * x.abs()));
    let est = integrate_adaptive(
        |theta| {
            let (c, f) = data.eval(theta);
            cap(c, l1) * cap(f, l2)
        },
        &panels,
        AdaptiveOptions { orders: (12, 8), ..AdaptiveOptions::with_tol(1e-2) },
    )?;
    Ok(est.value * (1.0 + 1e-3) + est.error)
}

/// Length of `{θ ∈ domain : |F(θ)| ≤ δ}`.
///
/// Each of roughly `n_grid` cells is split until `F` is monotone on it; the
/// crossings of `±δ` are then found by bisection.
pub fn sublevel_measure(pair: &PointPair, delta: f64, domain: &AngleDomain, n_grid: usize) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", format!("{delta} is not positive")));
    }
    if n_grid < 1000 {
        return Err(Error::invalid("n_grid", format!("{n_grid} is below 1000")));
    }
    let (d, s) = (pair.diff(), pair.sum());
    let data = PhaseData::new(pair);
    if d.norm() == 0.0 || s.norm() == 0.0 {
        // F is constant in θ.
        return Ok(if data.dt.abs() <= delta { domain.total_length() } else { 0.0 });
    }
    let phase = |theta: f64| data.eval(theta).1;
    let slope = |theta: f64| phase_f_prime_raw(theta, d, s);
    let total = domain.total_length();
    let mut pieces = Vec::new();
    for &(lo, hi) in domain.intervals() {
        let cells = ((n_grid as f64 * (hi - lo) / total).round() as usize).max(1);
        let step = (hi - lo) / cells as f64;
        for k in 0..cells {
            let a = lo + k as f64 * step;
            let b = if k + 1 == cells { hi } else { a + step };
            pieces.push(cell_sublevel(&phase, &slope, a, b, delta, 0));
        }
    }
    Ok(pairwise_sum(&pieces))
}

fn cell_sublevel(
    phase: &impl Fn(f64) -> f64,
    slope: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    delta: f64,
    depth: u32,
) -> f64 {
    let (sa, sb) = (slope(a), slope(b));
    if sa * sb > 0.0 {
        let sign = sa.signum();
        let g = |x: f64| sign * phase(x);
        // g is increasing on [a, b]; the sublevel set is [root(−δ), root(δ)].
        let root = |y: f64| -> f64 {
            if g(a) >= y {
                return a;
            }
            if g(b) <= y {
                return b;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) < y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        return root(delta) - root(-delta);
    }
    if depth >= 60 || b - a <= 1e-15 {
        return if phase(0.5 * (a + b)).abs() <= delta { b - a } else { 0.0 };
    }
    let mid = 0.5 * (a + b);
    cell_sublevel(phase, slope, a, mid, delta, depth + 1) + cell_sublevel(phase, slope, mid, b, delta, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{excluded_domain, Modulus};
    use std::f64::consts::PI;

    fn pair(p: (f64, f64, f64), q: (f64, f64, f64)) -> PointPair {
        PointPair::new(HPoint::new(p.0, p.1, p.2), HPoint::new(q.0, q.1, q.2))
    }

    fn angle(t: f64) -> Angle {
        Angle::new(t).unwrap()
    }

    #[test]
    fn phase_examples() {
        let pq = pair((0.0, 1.0, 0.0), (0.0, 2.0, 0.0));
        assert!((phase_f(angle(PI / 4.0), &pq) + 0.75).abs() < 1e-15);
        assert!((phase_f_alt(angle(PI / 4.0), &pq) + 0.75).abs() < 1e-15);
        assert!((phase_f_prime(angle(0.0), &pq).unwrap().abs() - 1.5).abs() < 1e-15);
        let same = pair((0.3, -0.2, 1.0), (0.3, -0.2, 0.25));
        for th in [0.0, 0.4, 2.0] {
            assert!((phase_f(angle(th), &same) - 0.75).abs() < 1e-15);
            assert!((phase_f_alt(angle(th), &same) - 0.75).abs() < 1e-15);
        }
        assert!(matches!(phase_f_prime(angle(0.1), &same), Err(Error::DegenerateDirection)));
        let opposite = pair((0.3, -0.2, 1.0), (-0.3, 0.2, 0.25));
        assert!(phase_f_prime(angle(0.1), &opposite).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet(0.0, 3.0), 6.0);
        assert!((dirichlet(0.25, 1.0) - 4.0 / PI).abs() < 1e-15);
        assert!(dirichlet(0.5, 1.0).abs() < 1e-15);
        // The series branch joins the closed form smoothly.
        let c = 1e-5 / (2.0 * PI);
        let closed = (2.0 * PI * c).sin() / (PI * c);
        assert!((dirichlet(c, 1.0) - closed).abs() < 1e-14);
    }

    #[test]
    fn ell_convention() {
        assert_eq!(pair((0.0, 0.0, 0.0), (0.25, 0.0, 0.0)).ell(), Some(1));
        assert_eq!(pair((0.0, 0.0, 0.0), (0.3, 0.0, 0.0)).ell(), Some(1));
        assert_eq!(pair((0.0, 0.0, 0.0), (0.2, 0.0, 0.0)).ell(), Some(2));
        assert_eq!(pair((0.0, 0.0, 0.0), (1.5, 0.0, 0.0)).ell(), Some(-1));
        assert_eq!(pair((1.0, 0.0, 0.0), (1.0, 0.0, 5.0)).ell(), None);
    }

    #[test]
    fn triple_integral_at_coincident_points() {
        let d = excluded_domain(angle(0.0), 0.1, Modulus::Four).unwrap();
        let pq = pair((1.0, 2.0, 3.0), (1.0, 2.0, 3.0));
        let v = inner_triple_integral(&pq, 0, &d, 1e-10).unwrap();
        assert!((v - 4.0 * d.total_length()).abs() < 1e-12);
        let v3 = inner_triple_integral(&pq, 3, &d, 1e-10).unwrap();
        assert!((v3 - 2f64.powi(3 * 3 + 2) * d.total_length()).abs() < 1e-9);
    }

    #[test]
    fn triple_integral_bounds_and_symmetry() {
        let d = excluded_domain(angle(0.0), 0.1, Modulus::Four).unwrap();
        let pq = pair((0.0, 1.0, 0.2), (0.0, 1.3, -0.1));
        for j in 0..5 {
            let v = inner_triple_integral(&pq, j, &d, 1e-9).unwrap();
            let bound = 2f64.powi(j as i32) * 2f64.powi(2 * j as i32 + 2) * d.total_length();
            assert!(v <= bound);
            let w = inner_triple_integral(&pq.swapped(), j, &d, 1e-9).unwrap();
            assert!((v - w).abs() <= 1e-9 * v.max(1e-300));
        }
        assert!(inner_triple_integral(&pq, 13, &d, 1e-6).is_err());
    }

    #[test]
    fn sublevel_extremes() {
        let d = excluded_domain(angle(0.0), 0.2, Modulus::Two).unwrap();
        let pq = pair((0.0, 1.0, 0.0), (0.0, 2.0, 0.0));
        // |F| = 0.75|sin 2θ| ≤ 0.75 everywhere.
        let full = sublevel_measure(&pq, 1.0, &d, 1000).unwrap();
        assert!((full - d.total_length()).abs() < 1e-12);
        let far = pair((0.0, 1.0, 10.0), (0.0, 2.0, 0.0));
        assert_eq!(sublevel_measure(&far, 1e-6, &d, 1000).unwrap(), 0.0);
        assert!(sublevel_measure(&pq, 0.1, &d, 10).is_err());
    }

    #[test]
    fn sublevel_matches_closed_form() {
        // F = -0.75 sin 2θ on the full circle: |F| ≤ δ on 4 arcs of half-width asin(δ/0.75)/2.
        let pq = pair((0.0, 1.0, 0.0), (0.0, 2.0, 0.0));
        let delta = 0.01;
        let want = 2.0 * (delta / 0.75f64).asin();
        let got = sublevel_measure(&pq, delta, &AngleDomain::full(), 1000).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}
