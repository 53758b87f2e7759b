//! Re-aiming variance reduction.
//!
//! Each stage-1 history is translated rigidly so that its leading
//! (highest-energy) particle passes through a uniformly chosen point of the
//! disc of radius r centred on the target sphere and normal to the particle's
//! direction. Directions and energies are untouched.
//!
//! Records emerge through a horizontal plane, so a record stands for a
//! crossing rate per unit horizontal area. Converted to a rate through an
//! area normal to its direction, that is a factor 1/|u_z| larger, which is
//! carried in the record weight. The exposure time grows by the ratio of the
//! generation area to the disc area πr², since every history now strikes
//! the disc.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CenteredBox, Vec3};
use crate::phase_space::{AimSphere, PhaseSpace, PhaseSpaceRecord};

/// Sphere that histories are aimed at, plus the area they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReaimTarget {
    pub center: Vec3,
    pub radius_cm: f64,
    pub generation_area_cm2: f64,
}

/// Enlargement of the enclosing sphere over the substrate half-diagonal.
pub const DEFAULT_SPHERE_MARGIN: f64 = 1.2;

impl ReaimTarget {
    pub fn new(center: Vec3, radius_cm: f64, generation_area_cm2: f64) -> Result<Self> {
        let t = ReaimTarget { center, radius_cm, generation_area_cm2 };
        t.area_ratio()?;
        Ok(t)
    }

    /// Default sphere around a substrate box centred on the origin.
    pub fn around(substrate: &CenteredBox, generation_area_cm2: f64) -> Result<Self> {
        Self::new(Vec3::ZERO, DEFAULT_SPHERE_MARGIN * substrate.half_diagonal(), generation_area_cm2)
    }

    pub fn disc_area(&self) -> f64 {
        std::f64::consts::PI * self.radius_cm * self.radius_cm
    }

    /// Generation area over disc area; must exceed 1.
    pub fn area_ratio(&self) -> Result<f64> {
        if !(self.radius_cm > 0.0) || !self.radius_cm.is_finite() {
            return Err(Error::invalid(format!("sphere radius {} must be > 0", self.radius_cm)));
        }
        let ratio = self.generation_area_cm2 / self.disc_area();
        if !(ratio > 1.0) {
            return Err(Error::invalid(format!(
                "generation area {} cm² does not exceed the sphere cross-section {} cm²",
                self.generation_area_cm2,
                self.disc_area()
            )));
        }
        Ok(ratio)
    }

    /// True if every corner of the box lies inside the sphere.
    pub fn encloses(&self, substrate: &CenteredBox) -> bool {
        let h = substrate.half;
        [-1.0, 1.0].iter().all(|&sx| {
            [-1.0, 1.0].iter().all(|&sy| {
                [-1.0, 1.0]
                    .iter()
                    .all(|&sz| (Vec3::new(sx * h.x, sy * h.y, sz * h.z) - self.center).norm() <= self.radius_cm)
            })
        })
    }

    pub fn sphere(&self) -> AimSphere {
        AimSphere { center: self.center, radius: self.radius_cm }
    }
}

fn lead_index(group: &[PhaseSpaceRecord]) -> usize {
    let mut best = 0;
    for (i, r) in group.iter().enumerate() {
        if r.energy_kev > group[best].energy_kev {
            best = i;
        }
    }
    best
}

/// Re-aim one history in place.
pub fn reaim_history<R: Rng + ?Sized>(group: &mut [PhaseSpaceRecord], target: &ReaimTarget, rng: &mut R) {
    if group.is_empty() {
        return;
    }
    let lead = group[lead_index(group)];
    let u = lead.direction;
    let (e1, e2) = u.orthonormal_basis();
    let rho = target.radius_cm * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let on_disc = target.center + e1 * (rho * phi.cos()) + e2 * (rho * phi.sin());
    let back = (target.radius_cm * target.radius_cm - rho * rho).max(0.0).sqrt();
    let entry = on_disc - u * back;
    let shift = entry - lead.position;
    let weight = 1.0 / u.z.abs().max(1e-12);
    for r in group.iter_mut() {
        r.position += shift;
        r.weight *= weight;
    }
}

/// Re-aim every history of `input` onto `target`, optionally reusing each
/// history `copies` times with independent aim points.
///
/// Copy c of history h receives id `h * copies + c`. The effective time is
/// multiplied by `copies × generation_area / (π r²)`.
pub fn reaim<R: Rng + ?Sized>(
    input: &PhaseSpace,
    target: &ReaimTarget,
    copies: u32,
    rng: &mut R,
) -> Result<PhaseSpace> {
    let ratio = target.area_ratio()?;
    if copies == 0 {
        return Err(Error::invalid("number of copies must be >= 1"));
    }
    if input.aim.is_some() {
        return Err(Error::invalid("phase space has already been re-aimed"));
    }
    if (input.generation_area_cm2 - target.generation_area_cm2).abs() > 1e-9 * input.generation_area_cm2 {
        return Err(Error::invalid("target generation area differs from the phase-space header"));
    }
    let mut out = PhaseSpace::new(input.effective_time_s * ratio * copies as f64, input.generation_area_cm2);
    out.aim = Some(target.sphere());
    out.records.reserve(input.records.len() * copies as usize);
    let mut group = Vec::new();
    for hist in input.histories() {
        for c in 0..copies {
            group.clear();
            group.extend_from_slice(hist);
            reaim_history(&mut group, target, rng);
            for r in &mut group {
                r.history = hist[0].history * copies as u64 + c as u64;
            }
            out.records.extend_from_slice(&group);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::Species;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn upward(n: usize) -> PhaseSpace {
        let mut ps = PhaseSpace::new(2.0, 1.0e6);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..n {
            let mut d = Vec3::isotropic(&mut rng);
            d.z = d.z.abs().max(1e-3);
            let mut r =
                PhaseSpaceRecord::new(Species::Photon, 100.0 + i as f64, Vec3::new(300.0, -20.0, 0.0), d.normalized());
            r.history = i as u64 / 2;
            ps.records.push(r);
        }
        ps
    }

    #[test]
    fn ratio_arithmetic() {
        let t = ReaimTarget::new(Vec3::ZERO, 1.0, 1.0e6).unwrap();
        assert!((t.area_ratio().unwrap() - 1.0e6 / std::f64::consts::PI).abs() < 1e-6);
        assert!((t.area_ratio().unwrap() - 3.1831e5).abs() < 1.0);
        assert!(ReaimTarget::new(Vec3::ZERO, 10.0, 100.0).is_err());
        assert!(ReaimTarget::new(Vec3::ZERO, 0.0, 100.0).is_err());
    }

    #[test]
    fn energy_and_direction_preserved_time_exact() {
        let ps = upward(200);
        let t = ReaimTarget::new(Vec3::ZERO, 0.8, 1.0e6).unwrap();
        let a = reaim(&ps, &t, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = reaim(&ps, &t, 1, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a.effective_time_s, b.effective_time_s);
        assert_eq!(a.effective_time_s, 2.0 * t.area_ratio().unwrap());
        for (x, y) in ps.records.iter().zip(&a.records) {
            assert_eq!(x.energy_kev, y.energy_kev);
            assert_eq!(x.direction, y.direction);
            assert_eq!(x.species, y.species);
        }
    }

    #[test]
    fn lead_particle_enters_sphere_and_partners_move_rigidly() {
        let ps = upward(400);
        let t = ReaimTarget::new(Vec3::new(0.0, 0.0, 5.0), 0.8, 1.0e6).unwrap();
        let out = reaim(&ps, &t, 1, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for (before, after) in ps.histories().zip(out.histories()) {
            let li = lead_index(before);
            let p = after[li].position;
            assert!(((p - t.center).norm() - t.radius_cm).abs() < 1e-9);
            // moving towards the centre
            assert!((t.center - p).dot(after[li].direction) >= -1e-9);
            let d0 = before[0].position - before[before.len() - 1].position;
            let d1 = after[0].position - after[after.len() - 1].position;
            assert!((d0 - d1).norm() < 1e-9);
        }
    }

    #[test]
    fn copies_scale_time_and_ids() {
        let ps = upward(10);
        let t = ReaimTarget::new(Vec3::ZERO, 0.8, 1.0e6).unwrap();
        let out = reaim(&ps, &t, 3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(out.len(), 30);
        assert_eq!(out.histories().count(), 15);
        assert_eq!(out.effective_time_s, 3.0 * 2.0 * t.area_ratio().unwrap());
        assert!(reaim(&out, &t, 1, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn disc_points_are_uniform() {
        // radial chi-square: equal-area annuli of the disc
        let t = ReaimTarget::new(Vec3::ZERO, 1.0, 1.0e6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let bins = 10;
        let n = 50_000;
        let mut radial = vec![0.0; bins];
        let mut azim = vec![0.0; bins];
        let dir = Vec3::new(0.3, -0.2, 0.9).normalized();
        let (e1, e2) = dir.orthonormal_basis();
        for _ in 0..n {
            let mut g = [PhaseSpaceRecord::new(Species::Photon, 1.0, Vec3::ZERO, dir)];
            reaim_history(&mut g, &t, &mut rng);
            let p = g[0].position;
            let (a, b) = (p.dot(e1), p.dot(e2));
            let r2 = a * a + b * b;
            radial[((r2 * bins as f64) as usize).min(bins - 1)] += 1.0;
            let phi = b.atan2(a) + std::f64::consts::PI;
            azim[((phi / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1)] += 1.0;
        }
        let expect = n as f64 / bins as f64;
        for h in [&radial, &azim] {
            let chi2: f64 = h.iter().map(|c| (c - expect).powi(2) / expect).sum();
            // 9 dof, p = 0.001 critical value 27.9
            assert!(chi2 < 27.9, "chi2 = {chi2}");
        }
    }

    #[test]
    fn enclosure_check() {
        let b = CenteredBox::new(Vec3::new(0.5, 0.5, 0.025));
        let t = ReaimTarget::around(&b, 1.0e6).unwrap();
        assert!(t.encloses(&b));
        let small = ReaimTarget::new(Vec3::ZERO, 0.6, 1.0e6).unwrap();
        assert!(!small.encloses(&b));
    }
}
