//! The first Heisenberg group: group law, Korányi metric, dilations and
//! projections onto vertical planes.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A horizontal vector `z = x + iy`, treated as a real 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Real inner product `⟨a, b⟩`.
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

/// A point `(x, y, t)` of the group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        HPoint { x, y, t }
    }

    pub fn from_parts(z: Vec2, t: f64) -> Self {
        HPoint::new(z.x, z.y, t)
    }

    /// Horizontal part `z`.
    pub fn z(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }
}

/// Coordinates `(v, t)` on a vertical plane, `v` measured along `ie^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub v: f64,
    pub t: f64,
}

impl PlanarPoint {
    pub const fn new(v: f64, t: f64) -> Self {
        PlanarPoint { v, t }
    }

    pub fn is_finite(self) -> bool {
        self.v.is_finite() && self.t.is_finite()
    }
}

/// An angle reduced to `[0, π)`. `θ` and `θ + π` give the same plane.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("theta", format!("{theta} is not finite")));
        }
        let mut r = theta.rem_euclid(PI);
        // rem_euclid can round up to exactly π for tiny negative inputs.
        if r >= PI {
            r = 0.0;
        }
        Ok(Angle(r))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `e^{iθ}`, spanning the horizontal line `V_θ`.
    pub fn direction(self) -> Vec2 {
        let (s, c) = self.0.sin_cos();
        Vec2::new(c, s)
    }

    /// `ie^{iθ}`, spanning the horizontal part of the vertical plane `V_θ⊥`.
    pub fn normal(self) -> Vec2 {
        let (s, c) = self.0.sin_cos();
        Vec2::new(-s, c)
    }
}

/// The symplectic form `ω(z₁, z₂) = x₁y₂ − y₁x₂`.
pub fn omega(z1: Vec2, z2: Vec2) -> f64 {
    z1.x * z2.y - z1.y * z2.x
}

pub fn group_mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint::new(
        p.x + q.x,
        p.y + q.y,
        p.t + q.t + 0.5 * omega(p.z(), q.z()),
    )
}

pub fn group_inv(p: HPoint) -> HPoint {
    HPoint::new(-p.x, -p.y, -p.t)
}

pub fn koranyi_norm(p: HPoint) -> f64 {
    let r2 = p.x * p.x + p.y * p.y;
    (r2 * r2 + 16.0 * p.t * p.t).sqrt().sqrt()
}

/// Korányi distance `‖q⁻¹ * p‖`.
pub fn dh(p: HPoint, q: HPoint) -> f64 {
    koranyi_norm(group_mul(group_inv(q), p))
}

/// `D_λ(z, t) = (λz, λ²t)`.
pub fn dilate(lambda: f64, p: HPoint) -> Result<HPoint> {
    check_dilation(lambda)?;
    Ok(HPoint::new(lambda * p.x, lambda * p.y, lambda * lambda * p.t))
}

pub(crate) fn check_dilation(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("lambda", format!("{lambda} is not a positive finite number")))
    }
}

/// Orthogonal projections of `z` onto `V_θ = span e^{iθ}` and onto its complement.
pub fn planar_proj(theta: Angle, z: Vec2) -> (Vec2, Vec2) {
    let e = theta.direction();
    let ie = theta.normal();
    (z.dot(e) * e, z.dot(ie) * ie)
}

/// Horizontal projection `(π_{V_θ}(z), 0)`.
pub fn horizontal_proj(theta: Angle, p: HPoint) -> HPoint {
    let (along, _) = planar_proj(theta, p.z());
    HPoint::from_parts(along, 0.0)
}

/// Vertical projection onto `V_θ⊥`: `(π_{V_θ⊥}(z), t + ω(π_{V_θ}(z), z)/2)`.
pub fn vertical_proj(theta: Angle, p: HPoint) -> HPoint {
    let e = theta.direction();
    let ie = theta.normal();
    let a = p.z().dot(e);
    let b = p.z().dot(ie);
    // ω(a e, a e + b ie) = a b because ω(e, ie) = 1.
    HPoint::from_parts(b * ie, p.t + 0.5 * a * b)
}

/// `U_θ(z, t) = (⟨z, ie^{iθ}⟩, t)`.
pub fn to_plane_coords(theta: Angle, p: HPoint) -> PlanarPoint {
    PlanarPoint::new(p.z().dot(theta.normal()), p.t)
}

/// Planar coordinates of the vertical projection, `U_θ(P_{V_θ⊥}(p))`.
pub fn project_to_plane(theta: Angle, p: HPoint) -> PlanarPoint {
    let e = theta.direction();
    let ie = theta.normal();
    let a = p.z().dot(e);
    let b = p.z().dot(ie);
    PlanarPoint::new(b, p.t + 0.5 * a * b)
}

/// Korányi distance between two points of a vertical plane in planar coordinates.
pub fn plane_distance(a: PlanarPoint, b: PlanarPoint) -> f64 {
    let dv = a.v - b.v;
    let dt = a.t - b.t;
    let dv2 = dv * dv;
    (dv2 * dv2 + 16.0 * dt * dt).sqrt().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)), 1.0);
        assert_eq!(omega(Vec2::new(0.3, -2.0), Vec2::new(0.3, -2.0)), 0.0);
        assert_eq!(omega(Vec2::new(0.0, -1.0), Vec2::new(1.0, 0.0)), 1.0);
    }

    #[test]
    fn group_examples() {
        let p = group_mul(HPoint::new(1.0, 0.0, 0.0), HPoint::new(0.0, 1.0, 0.0));
        assert_eq!(p, HPoint::new(1.0, 1.0, 0.5));
        let q = HPoint::new(0.2, -0.7, 3.0);
        assert_eq!(group_mul(HPoint::ORIGIN, q), q);
        let r = HPoint::new(1.0, 0.0, 0.0);
        assert_eq!(group_mul(r, r), HPoint::new(2.0, 0.0, 0.0));
        assert_eq!(group_inv(HPoint::new(1.0, 2.0, 3.0)), HPoint::new(-1.0, -2.0, -3.0));
        let u = HPoint::new(1.0, 1.0, 1.0);
        assert_eq!(group_mul(u, group_inv(u)), HPoint::ORIGIN);
    }

    #[test]
    fn norm_and_distance_examples() {
        assert_eq!(koranyi_norm(HPoint::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(koranyi_norm(HPoint::new(0.0, 0.0, 1.0)), 2.0);
        assert_eq!(koranyi_norm(HPoint::ORIGIN), 0.0);
        let d = dh(HPoint::new(1.0, 0.0, 0.0), HPoint::new(0.0, 1.0, 0.0));
        assert!(close(d, 8f64.powf(0.25), 1e-15));
        let p = HPoint::new(0.4, 1.1, -0.3);
        assert_eq!(dh(p, p), 0.0);
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilate(2.0, HPoint::new(1.0, 1.0, 1.0)).unwrap(), HPoint::new(2.0, 2.0, 4.0));
        let p = HPoint::new(0.4, 1.1, -0.3);
        assert_eq!(dilate(1.0, p).unwrap(), p);
        let n = koranyi_norm(dilate(3.0, HPoint::new(0.0, 0.0, 1.0)).unwrap());
        assert!(close(n, 6.0, 1e-14));
        assert!(dilate(0.0, p).is_err());
        assert!(dilate(-1.0, p).is_err());
    }

    #[test]
    fn angle_reduction() {
        assert!(close(Angle::new(PI + 0.5).unwrap().radians(), 0.5, 1e-15));
        assert!(close(Angle::new(-0.5).unwrap().radians(), PI - 0.5, 1e-15));
        let tiny = Angle::new(-1e-300).unwrap().radians();
        assert!((0.0..PI).contains(&tiny));
        assert!(Angle::new(f64::NAN).is_err());
    }

    #[test]
    fn planar_projection_examples() {
        let z = Vec2::new(3.0, 4.0);
        let (a, b) = planar_proj(Angle::new(0.0).unwrap(), z);
        assert_eq!((a, b), (Vec2::new(3.0, 0.0), Vec2::new(0.0, 4.0)));
        let (a, b) = planar_proj(Angle::new(PI / 2.0).unwrap(), z);
        assert!(close(a.x, 0.0, 1e-15) && close(a.y, 4.0, 1e-15));
        assert!(close(b.x, 3.0, 1e-15) && close(b.y, 0.0, 1e-15));
        let (a, b) = planar_proj(Angle::new(PI / 4.0).unwrap(), Vec2::new(1.0, 0.0));
        assert!(close(a.x, 0.5, 1e-15) && close(a.y, 0.5, 1e-15));
        assert!(close(b.x, 0.5, 1e-15) && close(b.y, -0.5, 1e-15));
    }

    #[test]
    fn vertical_projection_examples() {
        let (x, y, t) = (0.7, -1.3, 0.25);
        let p = vertical_proj(Angle::new(0.0).unwrap(), HPoint::new(x, y, t));
        assert!(close(p.x, 0.0, 1e-15) && close(p.y, y, 1e-15));
        assert!(close(p.t, t + x * y / 2.0, 1e-15));

        let quarter = Angle::new(PI / 4.0).unwrap();
        for x in [1.0, 1.25, 1.9, 2.0] {
            let q = vertical_proj(quarter, HPoint::new(x, 0.0, x * x / 4.0));
            assert!(q.t.abs() <= 1e-15, "t = {}", q.t);
        }

        let theta = Angle::new(0.8).unwrap();
        let fixed = HPoint::from_parts(2.5 * theta.normal(), -0.4);
        let back = vertical_proj(theta, fixed);
        assert!(close(back.x, fixed.x, 1e-15) && close(back.y, fixed.y, 1e-15));
        assert!(close(back.t, fixed.t, 1e-15));
    }

    #[test]
    fn plane_coordinate_examples() {
        let c = to_plane_coords(Angle::new(0.0).unwrap(), HPoint::new(0.0, 2.0, 3.0));
        assert_eq!(c, PlanarPoint::new(2.0, 3.0));
        let h = 2f64.sqrt() / 2.0;
        let c = to_plane_coords(Angle::new(PI / 4.0).unwrap(), HPoint::new(-h, h, 5.0));
        assert!(close(c.v, 1.0, 1e-15) && c.t == 5.0);
        let c = to_plane_coords(Angle::new(PI / 2.0).unwrap(), HPoint::new(-1.0, 0.0, 0.0));
        assert!(close(c.v, 1.0, 1e-15) && c.t == 0.0);
    }
}
