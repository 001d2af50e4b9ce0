use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{dh, HPoint};

use super::DiscreteMeasure;

/// Scan result for `sup μ(B(x, r)) / r^α`.
///
/// The scan only visits support points as centers and the given radii, so
/// `c_alpha` is a lower bound for the supremum over all balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrostmanEstimate {
    pub alpha: f64,
    pub c_alpha: f64,
    pub radii_scanned: Vec<f64>,
    pub argmax_center: HPoint,
    pub argmax_radius: f64,
}

/// Largest `μ(B(p, r)) / r^α` over support points `p` and the given radii.
/// Balls are closed; ties go to the smallest center index, then radius.
pub fn frostman_constant(mu: &DiscreteMeasure, alpha: f64, radii: &[f64]) -> Result<FrostmanEstimate> {
    if radii.is_empty() {
        return Err(Error::invalid("radii", "no radii to scan"));
    }
    if !(alpha > 0.0 && alpha <= 3.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not in (0, 3]")));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("radii", "radii must be positive, finite and sorted"));
    }
    let points = mu.points();
    let weights = mu.weights();
    let powers: Vec<f64> = radii.iter().map(|r| r.powf(alpha)).collect();

    let best: Vec<(f64, usize)> = points
        .par_iter()
        .map(|&center| {
            // Mass falling in each shell (r_{k-1}, r_k]; beyond the last radius is dropped.
            let mut shells = vec![0.0; radii.len()];
            for (&p, &w) in points.iter().zip(weights) {
                let d = dh(p, center);
                let k = radii.partition_point(|&r| r < d);
                if k < radii.len() {
                    shells[k] += w;
                }
            }
            let mut mass = 0.0;
            let mut top = (f64::NEG_INFINITY, 0);
            for (k, shell) in shells.iter().enumerate() {
                mass += shell;
                let ratio = mass / powers[k];
                if ratio > top.0 {
                    top = (ratio, k);
                }
            }
            top
        })
        .collect();

    let mut arg = 0;
    for (i, b) in best.iter().enumerate() {
        if b.0 > best[arg].0 {
            arg = i;
        }
    }
    Ok(FrostmanEstimate {
        alpha,
        c_alpha: best[arg].0,
        radii_scanned: radii.to_vec(),
        argmax_center: points[arg],
        argmax_radius: radii[best[arg].1],
    })
}
