use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::Angle;

/// Which quarter-turn shifts of `θ₀` are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulus {
    /// Odd multiples: `θ₀ + π/4`, `θ₀ + 3π/4`.
    Two,
    /// All non-multiples of 4: `θ₀ + π/4`, `θ₀ + π/2`, `θ₀ + 3π/4`.
    Four,
}

impl Modulus {
    fn shifts(self) -> &'static [u32] {
        match self {
            Modulus::Two => &[1, 3],
            Modulus::Four => &[1, 2, 3],
        }
    }

    pub fn value(self) -> u32 {
        match self {
            Modulus::Two => 2,
            Modulus::Four => 4,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Modulus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2" => Ok(Modulus::Two),
            "4" => Ok(Modulus::Four),
            other => Err(Error::invalid("modulus", format!("`{other}` is not 2 or 4"))),
        }
    }
}

/// A sorted union of disjoint half-open intervals in `[0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleDomain {
    intervals: Vec<(f64, f64)>,
}

impl AngleDomain {
    /// All of `[0, π)`.
    pub fn full() -> Self {
        AngleDomain {
            intervals: vec![(0.0, PI)],
        }
    }

    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.retain(|(lo, hi)| hi > lo);
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        if intervals.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for (lo, hi) in &intervals {
            if !(*lo >= 0.0 && *hi <= PI) {
                return Err(Error::invalid("domain", format!("[{lo}, {hi}) is not inside [0, π)")));
            }
        }
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::invalid("domain", "intervals overlap"));
        }
        Ok(AngleDomain { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| theta >= lo && theta < hi)
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &AngleDomain) -> bool {
        self.intervals
            .iter()
            .all(|&(lo, hi)| other.intervals.iter().any(|&(a, b)| a <= lo && hi <= b))
    }
}

/// `[0, π)` minus the open `ε`-neighbourhoods (circle metric) of the
/// excluded shifts `θ₀ + kπ/4`. `ε = 0` removes nothing.
pub fn excluded_domain(theta0: Angle, epsilon: f64, modulus: Modulus) -> Result<AngleDomain> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is not a nonnegative number")));
    }
    if epsilon == 0.0 {
        return Ok(AngleDomain::full());
    }
    if epsilon >= PI / 2.0 {
        return Err(Error::EmptyDomain);
    }
    let mut removed: Vec<(f64, f64)> = Vec::new();
    for &k in modulus.shifts() {
        let c = Angle::new(theta0.radians() + k as f64 * PI / 4.0)?.radians();
        let (lo, hi) = (c - epsilon, c + epsilon);
        if lo < 0.0 {
            removed.push((0.0, hi));
            removed.push((lo + PI, PI));
        } else if hi > PI {
            removed.push((lo, PI));
            removed.push((0.0, hi - PI));
        } else {
            removed.push((lo, hi));
        }
    }
    removed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut kept = Vec::new();
    let mut cursor = 0.0;
    for (lo, hi) in removed {
        if lo > cursor {
            kept.push((cursor, lo));
        }
        cursor = f64::max(cursor, hi);
    }
    if cursor < PI {
        kept.push((cursor, PI));
    }
    AngleDomain::new(kept)
}
