//! Weighted point clouds standing in for measures on the group and on
//! vertical planes.

mod frostman;
mod generators;
mod io;
mod spec;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{self, group_mul, project_to_plane, Angle, HPoint, PlanarPoint};
use crate::reduce::pairwise_sum;

pub use frostman::{frostman_constant, FrostmanEstimate};
pub use generators::{cantor_coordinates, parabola_measure, product_cantor_measure};
pub use io::{load_measure, load_planar_measure, meta_path, save_measure, save_planar_measure};
pub use spec::MeasureSpec;

/// Provenance of a generated measure, stored next to CSV files as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureMeta {
    pub generator: String,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl MeasureMeta {
    pub fn new(generator: impl Into<String>) -> Self {
        MeasureMeta {
            generator: generator.into(),
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

fn check_weights(n_points: usize, weights: &[f64]) -> Result<()> {
    if n_points == 0 {
        return Err(Error::invalid("points", "measure has no atoms"));
    }
    if n_points != weights.len() {
        return Err(Error::invalid(
            "weights",
            format!("{} weights for {} points", weights.len(), n_points),
        ));
    }
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::invalid(
            "weights",
            format!("weight {i} is {}, must be positive and finite", weights[i]),
        ));
    }
    Ok(())
}

/// A finite weighted sum of point masses on the group.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<HPoint>,
    weights: Vec<f64>,
    meta: MeasureMeta,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<HPoint>, weights: Vec<f64>, meta: MeasureMeta) -> Result<Self> {
        check_weights(points.len(), &weights)?;
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid("points", format!("point {i} is not finite")));
        }
        Ok(DiscreteMeasure {
            points,
            weights,
            meta,
        })
    }

    /// Equal weights `1/n` on the given points.
    pub fn uniform(points: Vec<HPoint>, meta: MeasureMeta) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        DiscreteMeasure::new(points, weights, meta)
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> &MeasureMeta {
        &self.meta
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Multiplies every weight by `c > 0`.
    pub fn scale_mass(&self, c: f64) -> Result<Self> {
        let weights = self.weights.iter().map(|w| w * c).collect();
        DiscreteMeasure::new(self.points.clone(), weights, self.meta.clone())
    }
}

/// A finite weighted point cloud in vertical-plane coordinates `(v, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMeasure {
    points: Vec<PlanarPoint>,
    weights: Vec<f64>,
}

impl PlanarMeasure {
    pub fn new(points: Vec<PlanarPoint>, weights: Vec<f64>) -> Result<Self> {
        check_weights(points.len(), &weights)?;
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid("points", format!("point {i} is not finite")));
        }
        Ok(PlanarMeasure { points, weights })
    }

    pub fn points(&self) -> &[PlanarPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn scale_mass(&self, c: f64) -> Result<Self> {
        let weights = self.weights.iter().map(|w| w * c).collect();
        PlanarMeasure::new(self.points.clone(), weights)
    }
}

/// Image of `mu` under `U_θ ∘ P_{V_θ⊥}`; weights are carried over unchanged.
pub fn pushforward_projection(mu: &DiscreteMeasure, theta: Angle) -> PlanarMeasure {
    PlanarMeasure {
        points: mu.points.iter().map(|&p| project_to_plane(theta, p)).collect(),
        weights: mu.weights.clone(),
    }
}

/// Left translation `p ↦ g * p`.
pub fn translate_measure(g: HPoint, mu: &DiscreteMeasure) -> DiscreteMeasure {
    DiscreteMeasure {
        points: mu.points.iter().map(|&p| group_mul(g, p)).collect(),
        weights: mu.weights.clone(),
        meta: mu.meta.clone(),
    }
}

/// Pushforward under the dilation `D_λ`.
pub fn dilate_measure(lambda: f64, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    heisenberg::check_dilation(lambda)?;
    Ok(DiscreteMeasure {
        points: mu
            .points
            .iter()
            .map(|&p| HPoint::new(lambda * p.x, lambda * p.y, lambda * lambda * p.t))
            .collect(),
        weights: mu.weights.clone(),
        meta: mu.meta.clone(),
    })
}
