use crate::error::{Error, Result};
use crate::heisenberg::{Angle, HPoint};

use super::{DiscreteMeasure, MeasureMeta};

/// Centers of the level-`depth` intervals of the two-map Cantor construction
/// of similarity dimension `dim` on `[lo, lo + 1]`.
///
/// `dim = 1` gives the uniform grid of `2^depth` cell centers; `dim = 0` gives
/// the single midpoint.
pub fn cantor_coordinates(dim: f64, depth: u32, lo: f64) -> Vec<f64> {
    if dim <= 0.0 {
        return vec![lo + 0.5];
    }
    let ratio = 2f64.powf(-1.0 / dim);
    let gap = 1.0 - ratio;
    let count = 1usize << depth;
    let last = ratio.powi(depth as i32);
    (0..count)
        .map(|idx| {
            let mut x = lo;
            let mut scale = 1.0;
            for level in 0..depth {
                if (idx >> (depth - 1 - level)) & 1 == 1 {
                    x += gap * scale;
                }
                scale *= ratio;
            }
            x + 0.5 * last
        })
        .collect()
}

/// Equal-weight measure on the parabola `{(x, 0, x²/4) : 1 ≤ x ≤ 2}`.
///
/// With `beta = 1` the `n` abscissae are uniform on `[1, 2]` (Heisenberg
/// dimension 2). With `beta < 1` they are the `2^⌈log₂ n⌉` level points of a
/// Cantor set of dimension `beta` in `x`, giving Heisenberg dimension `2β`.
pub fn parabola_measure(n: usize, beta: f64) -> Result<DiscreteMeasure> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 points, got {n}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("beta", format!("{beta} is not in (0, 1]")));
    }
    let xs: Vec<f64> = if beta == 1.0 {
        let step = 1.0 / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { 2.0 } else { 1.0 + i as f64 * step }).collect()
    } else {
        let depth = usize::BITS - (n - 1).leading_zeros();
        cantor_coordinates(beta, depth, 1.0)
    };
    let points = xs.into_iter().map(|x| HPoint::new(x, 0.0, x * x / 4.0)).collect();
    let meta = MeasureMeta::new("parabola")
        .param("n", n as f64)
        .param("beta", beta);
    DiscreteMeasure::uniform(points, meta)
}

/// Product of two Cantor measures in the plane coordinates of `V_{θ₀}⊥`:
/// dimension `a` in `v ∈ [R − ½, R + ½]` and `b` in `t ∈ [0, 1]`, for a
/// Heisenberg dimension of `a + 2b`.
pub fn product_cantor_measure(
    theta0: Angle,
    a: f64,
    b: f64,
    depth: u32,
    center_radius: f64,
) -> Result<DiscreteMeasure> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(name, format!("{v} is not in [0, 1]")));
        }
    }
    if depth < 1 || depth > 14 {
        return Err(Error::invalid("depth", format!("{depth} is not in 1..=14")));
    }
    if !(center_radius >= 1.0 && center_radius.is_finite()) {
        return Err(Error::invalid("R", format!("{center_radius} is below 1")));
    }
    let vs = cantor_coordinates(a, depth, center_radius - 0.5);
    let ts = cantor_coordinates(b, depth, 0.0);
    let normal = theta0.normal();
    let mut points = Vec::with_capacity(vs.len() * ts.len());
    for &v in &vs {
        for &t in &ts {
            points.push(HPoint::new(v * normal.x, v * normal.y, t));
        }
    }
    let meta = MeasureMeta::new("cantor")
        .param("a", a)
        .param("b", b)
        .param("depth", depth as f64)
        .param("theta0", theta0.radians())
        .param("R", center_radius);
    DiscreteMeasure::uniform(points, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_three_points() {
        let mu = parabola_measure(3, 1.0).unwrap();
        let want = [(1.0, 0.25), (1.5, 0.5625), (2.0, 1.0)];
        for (p, (x, t)) in mu.points().iter().zip(want) {
            assert_eq!((p.x, p.y, p.t), (x, 0.0, t));
        }
        assert!(mu.weights().iter().all(|&w| w == 1.0 / 3.0));
    }

    #[test]
    fn parabola_points_lie_on_curve() {
        for beta in [1.0, 0.75, 0.5] {
            let mu = parabola_measure(1000, beta).unwrap();
            for p in mu.points() {
                assert_eq!(p.y, 0.0);
                assert_eq!(p.t, p.x * p.x / 4.0);
                assert!((1.0..=2.0).contains(&p.x));
            }
        }
        assert_eq!(parabola_measure(1000, 0.5).unwrap().len(), 1024);
    }

    #[test]
    fn parabola_rejects_bad_input() {
        assert!(parabola_measure(1, 1.0).is_err());
        assert!(parabola_measure(10, 0.0).is_err());
        assert!(parabola_measure(10, 1.5).is_err());
    }

    #[test]
    fn cantor_full_dimension_is_grid() {
        let xs = cantor_coordinates(1.0, 3, 0.0);
        let want: Vec<f64> = (0..8).map(|k| (k as f64 + 0.5) / 8.0).collect();
        for (x, w) in xs.iter().zip(&want) {
            assert!((x - w).abs() < 1e-15);
        }
        assert_eq!(cantor_coordinates(0.0, 5, 2.0), vec![2.5]);
    }

    #[test]
    fn cantor_middle_thirds() {
        let dim = 2f64.ln() / 3f64.ln();
        let xs = cantor_coordinates(dim, 2, 0.0);
        let want = [1.0 / 18.0, 5.0 / 18.0, 13.0 / 18.0, 17.0 / 18.0];
        for (x, w) in xs.iter().zip(want) {
            assert!((x - w).abs() < 1e-14, "{x} vs {w}");
        }
    }

    #[test]
    fn product_cantor_lies_in_plane() {
        let theta0 = Angle::new(0.9).unwrap();
        let mu = product_cantor_measure(theta0, 0.6, 0.4, 5, 3.0).unwrap();
        let e = theta0.direction();
        for p in mu.points() {
            assert!(p.z().dot(e).abs() <= 1e-12);
            let r = p.z().norm();
            assert!((2.5..=3.5).contains(&r));
        }
        let grid = product_cantor_measure(theta0, 1.0, 1.0, 4, 1.0).unwrap();
        assert_eq!(grid.len(), 256);
        assert!(product_cantor_measure(theta0, 1.2, 0.5, 3, 1.0).is_err());
        assert!(product_cantor_measure(theta0, 0.5, 0.5, 0, 1.0).is_err());
        assert!(product_cantor_measure(theta0, 0.5, 0.5, 3, 0.5).is_err());
    }
}
