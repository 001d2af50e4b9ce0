//! Geometry, measures and numerical checks for vertical projections in the
//! first Heisenberg group.
//!
//! The group is `ℝ³` with the product
//! `(z, t) * (ζ, τ) = (z + ζ, t + τ + ω(z, ζ)/2)` and the Korányi metric
//! `d(p, q) = ‖q⁻¹ * p‖`, `‖(z, t)‖ = (|z|⁴ + 16 t²)^{1/4}`.
//!
//! Modules, roughly bottom-up:
//! - [`heisenberg`]: group law, metric, dilations and projections.
//! - [`measures`]: weighted point clouds, generators, Frostman constants, CSV I/O.
//! - [`energy`]: Riesz energies of projected measures, angle domains, Fourier checks.
//! - [`oscillatory`]: the phase function, Dirichlet kernels and the dyadic triple integral.
//! - [`dimension`]: anisotropic box counting and dimension regression.
//! - [`quadrature`], [`reduce`]: numerical plumbing shared by the above.

pub mod dimension;
pub mod energy;
pub mod error;
pub mod heisenberg;
pub mod measures;
pub mod oscillatory;
pub mod quadrature;
pub mod reduce;

pub use error::{Error, Result};
pub use heisenberg::{Angle, HPoint, PlanarPoint, Vec2};
