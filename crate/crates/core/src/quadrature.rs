//! Gauss–Legendre rules, composite tensor meshes and a globally adaptive
//! integrator for oscillatory one-dimensional integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::reduce::pairwise_sum;

/// Largest Gauss–Legendre order kept in the cache.
pub const MAX_ORDER: usize = 64;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Computes the rule by Newton iteration on the Legendre recurrence.
    pub fn compute(n: usize) -> GaussRule {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Cached rule of order `n` (1 ≤ n ≤ [`MAX_ORDER`]).
    pub fn get(n: usize) -> &'static GaussRule {
        static RULES: OnceLock<Vec<GaussRule>> = OnceLock::new();
        let rules = RULES.get_or_init(|| (1..=MAX_ORDER).map(GaussRule::compute).collect());
        &rules[n - 1]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`, returning `(∫f, ∫|f|)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(mid + half * x);
            sum += v;
            abs += v.abs();
        }
        (sum * half, abs * half.abs())
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite one-dimensional rule: nodes with absolute weights.
#[derive(Debug, Clone, Default)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    pub fn new() -> Self {
        AxisRule::default()
    }

    /// Appends an `order`-point Gauss rule on `[a, b]`.
    pub fn push_interval(&mut self, a: f64, b: f64, order: usize) {
        let rule = GaussRule::get(order);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            self.nodes.push(mid + half * x);
            self.weights.push(w * half);
        }
    }

    /// Appends `[0, g]` split geometrically toward zero: `[g/2, g]`,
    /// `[g/4, g/2]`, … down to `[0, g·2^{-levels}]`.
    pub fn push_graded_from_zero(&mut self, g: f64, levels: u32, order: usize) {
        let mut hi = g;
        for _ in 0..levels {
            let lo = 0.5 * hi;
            self.push_interval(lo, hi, order);
            hi = lo;
        }
        self.push_interval(0.0, hi, order);
    }

    /// Appends uniform cells of width `h` covering `[a, b]` (last cell clipped).
    pub fn push_uniform(&mut self, a: f64, b: f64, h: f64, order: usize) {
        let cells = ((b - a) / h).ceil().max(1.0) as usize;
        for k in 0..cells {
            let lo = a + k as f64 * h;
            let hi = (a + (k + 1) as f64 * h).min(b);
            if hi > lo {
                self.push_interval(lo, hi, order);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Options for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target relative error.
    pub rel_tol: f64,
    /// Fraction of `∫|f|` used as an absolute error floor, so integrals that
    /// cancel almost exactly still terminate.
    pub abs_floor: f64,
    /// Upper bound on the number of panels after bisection.
    pub max_panels: usize,
    /// Gauss orders of the panel rule and of the comparison rule used for
    /// the error estimate.
    pub orders: (usize, usize),
}

impl AdaptiveOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        AdaptiveOptions {
            rel_tol,
            abs_floor: 1e-3,
            max_panels: 200_000,
            orders: (HI_ORDER, LO_ORDER),
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub abs_integral: f64,
    pub evaluations: usize,
}

const HI_ORDER: usize = 30;
const LO_ORDER: usize = 20;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, orders: (usize, usize)) -> Panel {
    let hi = GaussRule::get(orders.0);
    let lo = GaussRule::get(orders.1);
    let (value, abs) = hi.integrate(a, b, &mut *f);
    let (coarse, _) = lo.integrate(a, b, &mut *f);
    Panel {
        a,
        b,
        value,
        abs,
        error: (value - coarse).abs(),
    }
}

/// Globally adaptive Gauss–Legendre quadrature over a list of panels.
///
/// Each panel is integrated with an `orders.0`-point rule and checked against
/// an `orders.1`-point rule (30 and 20 by default); the panel with the largest discrepancy is bisected until the
/// summed discrepancy is below `rel_tol · max(|I|, abs_floor · ∫|f|)`.
/// The caller is expected to pre-split oscillatory integrands into panels with
/// a bounded number of oscillations.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    panels: &[(f64, f64)],
    opts: AdaptiveOptions,
) -> Result<Estimate> {
    let orders = opts.orders;
    if orders.0 > MAX_ORDER || orders.1 == 0 || orders.1 >= orders.0 {
        return Err(Error::invalid("orders", format!("{orders:?} is not a valid rule pair")));
    }
    let per_panel = orders.0 + orders.1;
    let mut heap: BinaryHeap<Panel> = panels
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| eval_panel(&mut f, a, b, orders))
        .collect();
    let mut evaluations = heap.len() * per_panel;
    let max_panels = opts.max_panels.max(2 * heap.len());
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut v = 0.0;
        let mut a = 0.0;
        let mut e = 0.0;
        for p in heap.iter() {
            v += p.value;
            a += p.abs;
            e += p.error;
        }
        (v, a, e)
    };
    let (mut value, mut abs, mut error) = totals(&heap);
    let mut splits = 0usize;
    loop {
        let target = opts.rel_tol * value.abs().max(opts.abs_floor * abs);
        if error <= target || heap.is_empty() {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_bound: error,
            });
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error_bound: error,
            });
        }
        let left = eval_panel(&mut f, worst.a, mid, orders);
        let right = eval_panel(&mut f, mid, worst.b, orders);
        evaluations += 2 * per_panel;
        value += left.value + right.value - worst.value;
        abs += left.abs + right.abs - worst.abs;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Refresh the running sums occasionally to stop drift from the
        // incremental updates.
        splits += 1;
        if splits % 4096 == 0 {
            (value, abs, error) = totals(&heap);
        }
    }
    // Final value summed in panel order, independent of heap layout.
    let mut done = heap.into_vec();
    done.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = done.iter().map(|p| p.value).collect();
    let abss: Vec<f64> = done.iter().map(|p| p.abs).collect();
    let errs: Vec<f64> = done.iter().map(|p| p.error).collect();
    Ok(Estimate {
        value: pairwise_sum(&values),
        error: pairwise_sum(&errs),
        abs_integral: pairwise_sum(&abss),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in [1, 2, 5, 20, 30, 64] {
            let rule = GaussRule::get(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 1;
            let (v, _) = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let rule = GaussRule::get(13);
        for w in rule.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..13 {
            assert!((rule.nodes[i] + rule.nodes[12 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let w = 400.0;
        let exact = (1.0 - (w * 3.0_f64).cos()) / w;
        let panels: Vec<(f64, f64)> = (0..30).map(|k| (0.1 * k as f64, 0.1 * (k + 1) as f64)).collect();
        let est = integrate_adaptive(|x| (w * x).sin(), &panels, AdaptiveOptions::with_tol(1e-10)).unwrap();
        assert!((est.value - exact).abs() < 1e-10 * est.abs_integral);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = integrate_adaptive(|x| x.powf(-0.5), &[(0.0, 1.0)], AdaptiveOptions::with_tol(1e-8)).unwrap();
        assert!((est.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-14,
            abs_floor: 0.0,
            max_panels: 4,
            ..AdaptiveOptions::with_tol(1e-14)
        };
        let err = integrate_adaptive(|x| (1.0 / x).sin(), &[(1e-6, 1.0)], opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn adaptive_rejects_bad_rule_pair() {
        let opts = AdaptiveOptions { orders: (20, 30), ..AdaptiveOptions::with_tol(1e-8) };
        assert!(integrate_adaptive(|x| x, &[(0.0, 1.0)], opts).is_err());
    }

    #[test]
    fn graded_axis_rule_integrates_power_singularity() {
        let mut axis = AxisRule::new();
        axis.push_graded_from_zero(1.0, 60, 8);
        let v: f64 = axis.nodes.iter().zip(&axis.weights).map(|(x, w)| w * x.powf(-0.5)).sum();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }
}
