//! Small 3-vector type and the ray/box chord computation used by the
//! substrate stage.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    /// Uniform direction on the unit sphere.
    pub fn isotropic<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
        let cos_t: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t)
    }

    /// Two unit vectors completing `self` (assumed unit) to a right-handed basis.
    pub fn orthonormal_basis(self) -> (Vec3, Vec3) {
        let helper = if self.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        let e1 = self.cross(helper).normalized();
        let e2 = self.cross(e1);
        (e1, e2)
    }

    /// Rotate a unit direction by polar angle `acos(cos_t)` and azimuth `phi`
    /// about itself.
    pub fn deflect(self, cos_t: f64, phi: f64) -> Vec3 {
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let (e1, e2) = self.orthonormal_basis();
        (self * cos_t + e1 * (sin_t * phi.cos()) + e2 * (sin_t * phi.sin())).normalized()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned box centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredBox {
    pub half: Vec3,
}

impl CenteredBox {
    pub fn new(half: Vec3) -> Self {
        CenteredBox { half }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x.abs() <= self.half.x && p.y.abs() <= self.half.y && p.z.abs() <= self.half.z
    }

    pub fn half_diagonal(&self) -> f64 {
        self.half.norm()
    }

    /// Parametric interval `[t_in, t_out]` of the line `origin + t * dir`
    /// inside the box (slab method), or `None` when the line misses it.
    /// `t_in` may be negative when the origin is inside.
    pub fn intersect(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let mut t_in = f64::NEG_INFINITY;
        let mut t_out = f64::INFINITY;
        for (o, d, h) in
            [(origin.x, dir.x, self.half.x), (origin.y, dir.y, self.half.y), (origin.z, dir.z, self.half.z)]
        {
            if d == 0.0 {
                if o.abs() > h {
                    return None;
                }
            } else {
                let t1 = (-h - o) / d;
                let t2 = (h - o) / d;
                let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
                t_in = t_in.max(lo);
                t_out = t_out.min(hi);
            }
        }
        (t_out > t_in).then_some((t_in, t_out))
    }

    /// Length of the forward chord from `origin` along `dir`, with the
    /// origin clamped to the entry point.
    pub fn forward_chord(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let (t_in, t_out) = self.intersect(origin, dir)?;
        if t_out <= 0.0 {
            return None;
        }
        Some((t_in.max(0.0), t_out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_chord_equals_thickness() {
        let b = CenteredBox::new(Vec3::new(0.5, 0.5, 0.025));
        let (t0, t1) = b.forward_chord(Vec3::new(0.1, -0.2, -1.0), Vec3::Z).unwrap();
        assert!((t1 - t0 - 0.05).abs() < 1e-15);
    }

    #[test]
    fn oblique_line_can_miss() {
        let b = CenteredBox::new(Vec3::new(0.5, 0.5, 0.025));
        let d = Vec3::new(1.0, 0.0, 0.01).normalized();
        assert!(b.intersect(Vec3::new(0.0, 2.0, 0.0), d).is_none());
        assert!(b.forward_chord(Vec3::new(3.0, 0.0, 0.0), d).is_none());
    }

    #[test]
    fn deflect_preserves_angle() {
        let u = Vec3::new(0.3, -0.4, 0.5).normalized();
        let v = u.deflect(0.25, 1.3);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((u.dot(v) - 0.25).abs() < 1e-12);
    }
}
