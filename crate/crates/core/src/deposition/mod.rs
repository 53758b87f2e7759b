//! Second-stage transport: energy deposited in the substrate box.
//!
//! Each history of a re-aimed phase space is one candidate event; the
//! energies its particles leave in the box are summed and recorded if
//! positive. Photons interact through the material cross sections.
//! Charged particles entering from outside lose energy along their exact
//! chord, with Landau straggling in the thin regime. Electrons and
//! positrons created inside the box slow down along straight lines.

pub mod landau;
mod spectrum;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CenteredBox, Vec3};
use crate::histogram::Binning;
use crate::materials::{material, MaterialDef, SILICON_DENSITY};
use crate::phase_space::{PhaseSpace, PhaseSpaceRecord};
use crate::reaiming::ReaimTarget;
use crate::species::{Species, ELECTRON_MASS_KEV};
use crate::transport::interact::{annihilation_photons, interact, photon_coefficients};

pub use spectrum::{merge_spectra, DepositSpectrum, ExactTally, MergeMode};

/// Thickness of the reference wafer (µm).
pub const NOMINAL_THICKNESS_UM: f64 = 500.0;
/// Top area of the reference wafer (mm²).
pub const NOMINAL_AREA_MM2: f64 = 100.0;

/// Rectangular wafer centred on the origin, faces normal to the axes.
#[derive(Debug, Clone)]
pub struct SubstrateSpec {
    pub material: Arc<MaterialDef>,
    pub thickness_um: f64,
    pub width_mm: f64,
    pub length_mm: f64,
}

impl SubstrateSpec {
    pub fn new(material: Arc<MaterialDef>, thickness_um: f64, width_mm: f64, length_mm: f64) -> Result<Self> {
        let s = SubstrateSpec { material, thickness_um, width_mm, length_mm };
        s.validate()?;
        Ok(s)
    }

    /// 10 mm × 10 mm × 500 µm silicon.
    pub fn nominal() -> Self {
        SubstrateSpec {
            material: material("Si").expect("built-in material"),
            thickness_um: NOMINAL_THICKNESS_UM,
            width_mm: 10.0,
            length_mm: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("thickness", self.thickness_um), ("width", self.width_mm), ("length", self.length_mm)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("substrate {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Relative thickness τ = t / 500 µm.
    pub fn tau(&self) -> f64 {
        self.thickness_um / NOMINAL_THICKNESS_UM
    }

    pub fn area_mm2(&self) -> f64 {
        self.width_mm * self.length_mm
    }

    pub fn relative_density(&self) -> f64 {
        self.material.density / SILICON_DENSITY
    }

    /// Side area of a 500 µm wafer with this outline over its top area
    /// (0.2 for 10 × 10 mm², 1.1 for 10 × 1 mm²).
    pub fn shape_ratio(&self) -> f64 {
        let perimeter = 2.0 * (self.width_mm + self.length_mm);
        perimeter * (NOMINAL_THICKNESS_UM / 1000.0) / self.area_mm2()
    }

    /// Geometry in cm.
    pub fn bounding_box(&self) -> CenteredBox {
        CenteredBox::new(Vec3::new(self.width_mm / 20.0, self.length_mm / 20.0, self.thickness_um / 2.0e4))
    }
}

/// How charged particles crossing the substrate lose energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Straggling {
    /// Mean loss only.
    None,
    Landau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepositConfig {
    pub straggling: Straggling,
    pub photon_cutoff_kev: f64,
    pub charged_cutoff_kev: f64,
    pub binning: Binning,
}

impl Default for DepositConfig {
    fn default() -> Self {
        DepositConfig {
            straggling: Straggling::Landau,
            photon_cutoff_kev: 1.0,
            charged_cutoff_kev: 10.0,
            binning: Binning::default_deposit(),
        }
    }
}

impl DepositConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.photon_cutoff_kev >= 1.0) {
            return Err(Error::invalid("substrate photon cutoff must be at least 1 keV"));
        }
        if !(self.charged_cutoff_kev >= 10.0) {
            return Err(Error::invalid("substrate charged cutoff must be at least 10 keV"));
        }
        Ok(())
    }
}

/// A particle whose mean loss over the chord stays under this fraction of
/// its energy uses the local stopping power; otherwise the range table.
const THIN_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
struct Particle {
    species: Species,
    energy_kev: f64,
    position: Vec3,
    direction: Vec3,
    /// Entered from outside (eligible for straggling).
    external: bool,
}

struct Tracker<'a, R: ?Sized> {
    mat: &'a MaterialDef,
    bx: CenteredBox,
    cfg: &'a DepositConfig,
    rng: &'a mut R,
    stack: Vec<Particle>,
    deposit: f64,
}

impl<R: Rng + ?Sized> Tracker<'_, R> {
    fn run(&mut self) -> Result<()> {
        while let Some(p) = self.stack.pop() {
            match p.species {
                Species::Photon => self.photon(p)?,
                Species::Neutron => {}
                _ => self.charged(p)?,
            }
        }
        Ok(())
    }

    fn photon(&mut self, mut p: Particle) -> Result<()> {
        loop {
            let Some((t_in, t_out)) = self.bx.forward_chord(p.position, p.direction) else {
                return Ok(());
            };
            if p.energy_kev < self.cfg.photon_cutoff_kev {
                self.deposit += p.energy_kev;
                return Ok(());
            }
            let parts = photon_coefficients(self.mat, p.energy_kev)?;
            let mu = parts[0] + parts[1] + parts[2];
            let free = -(1.0 - self.rng.random::<f64>()).ln() / mu;
            if free >= t_out - t_in {
                return Ok(());
            }
            p.position += p.direction * (t_in + free);
            let products = interact(p.energy_kev, p.direction, parts, self.rng);
            for (species, e, d) in products.charged {
                self.stack.push(Particle {
                    species,
                    energy_kev: e,
                    position: p.position,
                    direction: d,
                    external: false,
                });
            }
            match products.photon {
                Some((e, d)) => {
                    p.energy_kev = e;
                    p.direction = d;
                }
                None => return Ok(()),
            }
        }
    }

    fn stop(&mut self, p: Particle, at: Vec3) {
        self.deposit += p.energy_kev;
        if p.species == Species::Positron {
            for (e, d) in annihilation_photons(self.rng) {
                self.stack.push(Particle {
                    species: Species::Photon,
                    energy_kev: e,
                    position: at,
                    direction: d,
                    external: false,
                });
            }
        }
    }

    fn charged(&mut self, p: Particle) -> Result<()> {
        let Some((t_in, t_out)) = self.bx.forward_chord(p.position, p.direction) else {
            return Ok(());
        };
        let entry = p.position + p.direction * t_in;
        let chord = t_out - t_in;
        if chord <= 0.0 {
            return Ok(());
        }
        if p.energy_kev < self.cfg.charged_cutoff_kev {
            self.stop(p, entry);
            return Ok(());
        }
        let t_mev = p.energy_kev / 1000.0;
        let s_kev_cm = self.mat.stopping_power(p.species, t_mev)? * 1000.0;
        let mean = s_kev_cm * chord;
        let loss = if mean <= THIN_FRACTION * p.energy_kev {
            match (self.cfg.straggling, p.external) {
                (Straggling::Landau, true) => {
                    landau::sample_energy_loss(self.mat, p.species, p.energy_kev, chord, mean, self.rng)
                }
                _ => mean,
            }
        } else {
            match self.mat.energy_after_path(p.species, t_mev, chord)? {
                Some(out) if out * 1000.0 >= self.cfg.charged_cutoff_kev => p.energy_kev - out * 1000.0,
                _ => p.energy_kev,
            }
        };
        if loss >= p.energy_kev {
            let range = self.mat.csda_range(p.species, t_mev)?.min(chord);
            self.stop(p, entry + p.direction * range);
        } else {
            self.deposit += loss;
        }
        Ok(())
    }
}

/// Energy (keV) one history leaves in the substrate.
pub fn deposit_history<R: Rng + ?Sized>(
    group: &[PhaseSpaceRecord],
    substrate: &SubstrateSpec,
    cfg: &DepositConfig,
    rng: &mut R,
) -> Result<f64> {
    let mut t =
        Tracker { mat: &substrate.material, bx: substrate.bounding_box(), cfg, rng, stack: Vec::new(), deposit: 0.0 };
    for r in group.iter().rev() {
        t.stack.push(Particle {
            species: r.species,
            energy_kev: r.energy_kev,
            position: r.position,
            direction: r.direction,
            external: true,
        });
    }
    t.run()?;
    Ok(t.deposit)
}

/// Check that a phase space has been aimed at a sphere enclosing the
/// substrate.
pub fn check_enclosed(ps: &PhaseSpace, substrate: &SubstrateSpec) -> Result<()> {
    let aim = ps.aim.ok_or_else(|| Error::invalid("phase space has not been re-aimed onto the substrate"))?;
    let target = ReaimTarget { center: aim.center, radius_cm: aim.radius, generation_area_cm2: ps.generation_area_cm2 };
    if !target.encloses(&substrate.bounding_box()) {
        return Err(Error::invalid(format!("re-aim sphere (radius {} cm) does not enclose the substrate", aim.radius)));
    }
    Ok(())
}

/// Deposit every history of a re-aimed phase space.
pub fn deposit<R: Rng + ?Sized>(
    ps: &PhaseSpace,
    substrate: &SubstrateSpec,
    cfg: &DepositConfig,
    rng: &mut R,
) -> Result<DepositSpectrum> {
    substrate.validate()?;
    cfg.validate()?;
    check_enclosed(ps, substrate)?;
    let mut spec = DepositSpectrum::new(cfg.binning.clone(), ps.effective_time_s)?;
    for group in ps.histories() {
        let e = deposit_history(group, substrate, cfg, rng)?;
        let w = group.iter().map(|r| r.weight).fold(0.0, f64::max);
        spec.fill(e, w);
    }
    Ok(spec)
}

/// Kinetic energy plus positron rest mass that a history can release.
pub fn available_energy(group: &[PhaseSpaceRecord]) -> f64 {
    group
        .iter()
        .map(|r| r.energy_kev + if r.species == Species::Positron { 2.0 * ELECTRON_MASS_KEV } else { 0.0 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nominal_geometry() {
        let s = SubstrateSpec::nominal();
        assert_eq!(s.tau(), 1.0);
        assert_eq!(s.area_mm2(), 100.0);
        assert!((s.shape_ratio() - 0.2).abs() < 1e-12);
        let narrow = SubstrateSpec { width_mm: 10.0, length_mm: 1.0, ..SubstrateSpec::nominal() };
        assert!((narrow.shape_ratio() - 1.1).abs() < 1e-12);
        let b = s.bounding_box();
        assert!((b.half.z - 0.025).abs() < 1e-15);
        assert!(SubstrateSpec::new(material("Si").unwrap(), 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn vertical_mip_without_straggling_is_exact() {
        let s = SubstrateSpec::nominal();
        let cfg = DepositConfig { straggling: Straggling::None, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = 3.0e6;
        let rec = PhaseSpaceRecord::new(Species::MuonMinus, e, Vec3::new(0.1, -0.2, 1.0), -Vec3::Z);
        let got = deposit_history(&[rec], &s, &cfg, &mut rng).unwrap();
        let want = s.material.stopping_power(Species::MuonMinus, e / 1000.0).unwrap() * 1000.0 * 0.05;
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn missing_the_box_deposits_nothing() {
        let s = SubstrateSpec::nominal();
        let cfg = DepositConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = PhaseSpaceRecord::new(Species::MuonMinus, 1.0e6, Vec3::new(2.0, 0.0, 1.0), -Vec3::Z);
        assert_eq!(deposit_history(&[rec], &s, &cfg, &mut rng).unwrap(), 0.0);
        let away = PhaseSpaceRecord::new(Species::Photon, 500.0, Vec3::new(0.0, 0.0, 1.0), Vec3::Z);
        assert_eq!(deposit_history(&[away], &s, &cfg, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn slow_electron_stops_inside() {
        let s = SubstrateSpec::nominal();
        let cfg = DepositConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = PhaseSpaceRecord::new(Species::Electron, 100.0, Vec3::new(0.0, 0.0, 1.0), -Vec3::Z);
        assert_eq!(deposit_history(&[rec], &s, &cfg, &mut rng).unwrap(), 100.0);
    }

    #[test]
    fn deposits_bounded_by_available_energy() {
        let s = SubstrateSpec::nominal();
        let cfg = DepositConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..3000 {
            let species =
                [Species::Photon, Species::Electron, Species::Positron, Species::MuonPlus, Species::Proton][i % 5];
            let e = 10f64.powf(1.5 + 4.0 * rng.random::<f64>());
            let d = Vec3::isotropic(&mut rng);
            let start = -d * 0.8 + Vec3::new(0.3 * rng.random::<f64>(), 0.0, 0.0);
            let rec = PhaseSpaceRecord::new(species, e, start, d);
            let got = deposit_history(&[rec], &s, &cfg, &mut rng).unwrap();
            assert!(got >= 0.0 && got <= available_energy(&[rec]) * (1.0 + 1e-6), "{species} {e} {got}");
        }
    }

    #[test]
    fn unaimed_phase_space_rejected() {
        let ps = PhaseSpace::new(1.0, 1.0e6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(deposit(&ps, &SubstrateSpec::nominal(), &DepositConfig::default(), &mut rng).is_err());
    }
}
