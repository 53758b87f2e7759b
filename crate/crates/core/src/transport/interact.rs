//! Photon interaction physics shared by slab and substrate transport.

use rand::Rng;

use crate::error::Result;
use crate::geometry::Vec3;
use crate::materials::MaterialDef;
use crate::species::{Species, ELECTRON_MASS_KEV};

use super::compton::sample_klein_nishina;

/// Linear attenuation coefficients (cm⁻¹) for photoelectric, Compton and
/// pair. Above the tabulated range the top-of-table values are used.
pub(crate) fn photon_coefficients(material: &MaterialDef, energy_kev: f64) -> Result<[f64; 3]> {
    let (_, hi) = material.photon_energy_range();
    material.attenuation_parts(energy_kev.min(hi))
}

/// Particles leaving an interaction point.
#[derive(Debug, Default)]
pub(crate) struct Products {
    pub photon: Option<(f64, Vec3)>,
    pub charged: Vec<(Species, f64, Vec3)>,
    /// Rest mass converted to kinetic energy is negative, created is positive.
    pub rest_mass_kev: f64,
}

pub(crate) fn interact<R: Rng + ?Sized>(energy_kev: f64, direction: Vec3, parts: [f64; 3], rng: &mut R) -> Products {
    let total = parts[0] + parts[1] + parts[2];
    let pick = rng.random::<f64>() * total;
    let mut out = Products::default();
    if pick < parts[0] {
        // binding energy is neglected; the electron takes everything
        out.charged.push((Species::Electron, energy_kev, Vec3::isotropic(rng)));
    } else if pick < parts[0] + parts[1] || energy_kev <= 2.0 * ELECTRON_MASS_KEV {
        let s = sample_klein_nishina(energy_kev, rng);
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let scattered = energy_kev * s.epsilon;
        let new_dir = direction.deflect(s.cos_theta, phi);
        let electron_kev = energy_kev - scattered;
        // electron momentum is the photon momentum transfer
        let p_e = direction * energy_kev - new_dir * scattered;
        let e_dir = if p_e.norm() > 0.0 { p_e.normalized() } else { direction };
        out.photon = Some((scattered, new_dir));
        if electron_kev > 0.0 {
            out.charged.push((Species::Electron, electron_kev, e_dir));
        }
    } else {
        let kinetic = energy_kev - 2.0 * ELECTRON_MASS_KEV;
        let share = rng.random::<f64>();
        out.charged.push((Species::Electron, kinetic * share, direction));
        out.charged.push((Species::Positron, kinetic * (1.0 - share), direction));
        out.rest_mass_kev = 2.0 * ELECTRON_MASS_KEV;
    }
    out
}

/// Two back-to-back annihilation photons with random orientation.
pub(crate) fn annihilation_photons<R: Rng + ?Sized>(rng: &mut R) -> [(f64, Vec3); 2] {
    let d = Vec3::isotropic(rng);
    [(ELECTRON_MASS_KEV, d), (ELECTRON_MASS_KEV, -d)]
}
