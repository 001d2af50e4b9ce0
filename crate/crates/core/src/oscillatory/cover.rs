use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::heisenberg::{dh, HPoint};

/// Size of a greedy `2^{-ℓ}`-net of `samples` uniform points drawn from
/// `{(ζ, τ) : |ζ| ≤ 2^{-ℓ}, |ζ|⁴ + 16τ² ≤ 1}`, the part of the unit Korányi
/// ball around the origin lying in a thin vertical cylinder.
///
/// The net size bounds from below the number of radius-`2^{-ℓ}` balls needed
/// to cover the sample, and the balls centred at the net cover it.
pub fn cylinder_ball_cover_count(ell: u32, samples: usize, seed: u64) -> Result<usize> {
    if ell > 10 {
        return Err(Error::invalid("ell", format!("{ell} exceeds 10")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let r = 0.5f64.powi(ell as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Net points within distance r of each other differ by at most r
    // horizontally and 3r²/4 vertically (the twist term adds at most r²/2).
    let (cell_z, cell_t) = (r, 0.75 * r * r);
    let key = |p: &HPoint| {
        (
            (p.x / cell_z).floor() as i64,
            (p.y / cell_z).floor() as i64,
            (p.t / cell_t).floor() as i64,
        )
    };
    let mut net: Vec<HPoint> = Vec::new();
    let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
    let mut drawn = 0;
    while drawn < samples {
        let rad = r * rng.gen::<f64>().sqrt();
        let ang = std::f64::consts::TAU * rng.gen::<f64>();
        let tau = rng.gen_range(-0.25..0.25);
        let z2 = rad * rad;
        if z2 * z2 + 16.0 * tau * tau > 1.0 {
            continue;
        }
        drawn += 1;
        let p = HPoint::new(rad * ang.cos(), rad * ang.sin(), tau);
        let (i, k, m) = key(&p);
        let mut covered = false;
        'search: for di in -1..=1 {
            for dk in -1..=1 {
                for dm in -1..=1 {
                    if let Some(ids) = cells.get(&(i + di, k + dk, m + dm)) {
                        if ids.iter().any(|&id| dh(p, net[id as usize]) <= r) {
                            covered = true;
                            break 'search;
                        }
                    }
                }
            }
        }
        if !covered {
            cells.entry((i, k, m)).or_default().push(net.len() as u32);
            net.push(p);
        }
    }
    Ok(net.len())
}
