//! First-stage transport through broad shielding slabs.
//!
//! Slabs are stacked along z and extend without limit in x and y. Photons
//! are tracked interaction by interaction; charged particles slow down
//! continuously along straight lines; neutrons are removed exponentially.
//! Every history conserves energy: the initial kinetic energy equals the
//! layer deposits plus exiting kinetic energy plus net rest mass created.

mod compton;
pub(crate) mod interact;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::materials::{material, MaterialDef};
use crate::phase_space::{PhaseSpace, PhaseSpaceRecord};
use crate::sources::{ChainActivities, CosmicSource, LineLibrary};
use crate::species::Species;

pub use compton::{klein_nishina_density, sample_klein_nishina, ComptonScatter};
use interact::{annihilation_photons, interact, photon_coefficients};

/// One slab of homogeneous material.
#[derive(Debug, Clone)]
pub struct Layer {
    pub material: Arc<MaterialDef>,
    pub thickness_cm: f64,
}

impl Layer {
    pub fn new(material: Arc<MaterialDef>, thickness_cm: f64) -> Self {
        Layer { material, thickness_cm }
    }
}

/// Layers listed from the top down, the first starting at `z_top_cm`.
#[derive(Debug, Clone)]
pub struct SlabGeometry {
    layers: Vec<Layer>,
    z_top_cm: f64,
    /// boundaries[i] is the top of layer i; the last entry is the bottom.
    boundaries: Vec<f64>,
}

impl SlabGeometry {
    pub fn new(layers: Vec<Layer>, z_top_cm: f64) -> Result<Self> {
        let mut boundaries = vec![z_top_cm];
        let mut z = z_top_cm;
        for l in &layers {
            if !(l.thickness_cm >= 0.0) || !l.thickness_cm.is_finite() {
                return Err(Error::invalid(format!(
                    "layer of {} has invalid thickness {}",
                    l.material.name, l.thickness_cm
                )));
            }
            z -= l.thickness_cm;
            boundaries.push(z);
        }
        Ok(SlabGeometry { layers, z_top_cm, boundaries })
    }

    /// Aluminium shell over a thick concrete emitter, top face at z = 0.
    pub fn gamma_emitter(concrete_cm: f64, aluminum_cm: f64) -> Result<Self> {
        Self::new(vec![Layer::new(material("Al")?, aluminum_cm), Layer::new(material("concrete")?, concrete_cm)], 0.0)
    }

    /// Concrete ceiling above an aluminium shell, top face at z = 0.
    pub fn ceiling(ceiling_cm: f64, aluminum_cm: f64) -> Result<Self> {
        Self::new(vec![Layer::new(material("concrete")?, ceiling_cm), Layer::new(material("Al")?, aluminum_cm)], 0.0)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn z_top(&self) -> f64 {
        self.z_top_cm
    }

    pub fn z_bottom(&self) -> f64 {
        self.boundaries[self.boundaries.len() - 1]
    }

    pub fn total_thickness(&self) -> f64 {
        self.z_top_cm - self.z_bottom()
    }

    /// (bottom, top) of layer i.
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i + 1], self.boundaries[i])
    }

    /// Layer a particle at height z moving with vertical cosine dz is in.
    /// On a boundary the layer in the direction of travel is chosen.
    fn locate(&self, z: f64, dz: f64) -> Option<usize> {
        for (i, l) in self.layers.iter().enumerate() {
            if l.thickness_cm == 0.0 {
                continue;
            }
            let (lo, hi) = self.bounds(i);
            if (z > lo && z < hi) || (z == hi && dz < 0.0) || (z == lo && dz > 0.0) {
                return Some(i);
            }
            if z == hi && dz == 0.0 {
                return Some(i);
            }
        }
        None
    }
}

/// Cutoffs and simplified neutron treatment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportConfig {
    pub photon_cutoff_kev: f64,
    pub charged_cutoff_kev: f64,
    /// Mass removal coefficient for neutrons (cm²/g).
    pub neutron_removal_cm2_per_g: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig { photon_cutoff_kev: 10.0, charged_cutoff_kev: 20.0, neutron_removal_cm2_per_g: 0.039 }
    }
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.photon_cutoff_kev >= 1.0) {
            return Err(Error::invalid("photon cutoff must be at least 1 keV"));
        }
        if !(self.charged_cutoff_kev >= 10.0) {
            return Err(Error::invalid("charged cutoff must be at least 10 keV"));
        }
        if !(self.neutron_removal_cm2_per_g >= 0.0) {
            return Err(Error::invalid("neutron removal coefficient must be >= 0"));
        }
        Ok(())
    }
}

/// What came out of one history.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransportOutcome {
    pub exiting: Vec<PhaseSpaceRecord>,
    /// keV deposited per layer.
    pub deposits_kev: Vec<f64>,
    /// Net rest mass created (keV): +1022 per pair, -1022 per annihilation.
    pub rest_mass_created_kev: f64,
}

impl TransportOutcome {
    fn new(n_layers: usize) -> Self {
        TransportOutcome { exiting: Vec::new(), deposits_kev: vec![0.0; n_layers], rest_mass_created_kev: 0.0 }
    }

    pub fn total_deposit(&self) -> f64 {
        self.deposits_kev.iter().sum()
    }

    pub fn exiting_energy(&self) -> f64 {
        self.exiting.iter().map(|r| r.energy_kev).sum()
    }

    /// Deposits + exiting kinetic energy + rest mass created; equals the
    /// initial kinetic energy.
    pub fn accounted_energy(&self) -> f64 {
        self.total_deposit() + self.exiting_energy() + self.rest_mass_created_kev
    }
}

#[derive(Debug, Clone, Copy)]
struct Particle {
    species: Species,
    energy_kev: f64,
    position: Vec3,
    direction: Vec3,
}

struct Engine<'a, R: ?Sized> {
    geom: &'a SlabGeometry,
    cfg: &'a TransportConfig,
    rng: &'a mut R,
    out: TransportOutcome,
    stack: Vec<Particle>,
    template: PhaseSpaceRecord,
}

impl<R: Rng + ?Sized> Engine<'_, R> {
    fn run(mut self, first: Particle) -> Result<TransportOutcome> {
        self.stack.push(first);
        while let Some(p) = self.stack.pop() {
            match p.species {
                Species::Photon => self.photon(p)?,
                Species::Neutron => self.neutron(p),
                _ => self.charged(p)?,
            }
        }
        Ok(self.out)
    }

    fn exit(&mut self, p: Particle) {
        self.out.exiting.push(PhaseSpaceRecord {
            species: p.species,
            energy_kev: p.energy_kev,
            position: p.position,
            direction: p.direction,
            ..self.template
        });
    }

    /// Distance along the direction to the boundary of layer i, and the
    /// boundary height reached.
    fn to_boundary(&self, i: usize, p: &Particle) -> (f64, f64) {
        let (lo, hi) = self.geom.bounds(i);
        let dz = p.direction.z;
        if dz > 0.0 {
            ((hi - p.position.z) / dz, hi)
        } else if dz < 0.0 {
            ((lo - p.position.z) / dz, lo)
        } else {
            (f64::INFINITY, p.position.z)
        }
    }

    fn move_to(p: &mut Particle, dist: f64, z: f64) {
        p.position += p.direction * dist;
        p.position.z = z;
    }

    fn photon(&mut self, mut p: Particle) -> Result<()> {
        loop {
            let Some(i) = self.geom.locate(p.position.z, p.direction.z) else {
                self.exit(p);
                return Ok(());
            };
            if p.energy_kev < self.cfg.photon_cutoff_kev {
                self.out.deposits_kev[i] += p.energy_kev;
                return Ok(());
            }
            let mat = &self.geom.layers[i].material;
            let parts = photon_coefficients(mat, p.energy_kev)?;
            let mu = parts[0] + parts[1] + parts[2];
            let free = -(1.0 - self.rng.random::<f64>()).ln() / mu;
            let (dist, z_b) = self.to_boundary(i, &p);
            if free >= dist {
                Self::move_to(&mut p, dist, z_b);
                continue;
            }
            p.position += p.direction * free;
            let products = interact(p.energy_kev, p.direction, parts, self.rng);
            self.out.rest_mass_created_kev += products.rest_mass_kev;
            for (species, e, d) in products.charged {
                self.stack.push(Particle { species, energy_kev: e, position: p.position, direction: d });
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

    fn stop_charged(&mut self, p: Particle, layer: usize) {
        self.out.deposits_kev[layer] += p.energy_kev;
        if p.species == Species::Positron {
            self.out.rest_mass_created_kev -= 2.0 * crate::species::ELECTRON_MASS_KEV;
            for (e, d) in annihilation_photons(self.rng) {
                self.stack.push(Particle {
                    species: Species::Photon,
                    energy_kev: e,
                    position: p.position,
                    direction: d,
                });
            }
        }
    }

    fn charged(&mut self, mut p: Particle) -> Result<()> {
        loop {
            let Some(i) = self.geom.locate(p.position.z, p.direction.z) else {
                if p.energy_kev > 0.0 {
                    self.exit(p);
                }
                return Ok(());
            };
            if p.energy_kev < self.cfg.charged_cutoff_kev {
                self.stop_charged(p, i);
                return Ok(());
            }
            let mat = self.geom.layers[i].material.clone();
            let (dist, z_b) = self.to_boundary(i, &p);
            let t_mev = p.energy_kev / 1000.0;
            let after = if dist.is_finite() { mat.energy_after_path(p.species, t_mev, dist)? } else { None };
            match after {
                Some(t_out) if t_out * 1000.0 >= self.cfg.charged_cutoff_kev => {
                    let e_out = t_out * 1000.0;
                    self.out.deposits_kev[i] += p.energy_kev - e_out;
                    p.energy_kev = e_out;
                    Self::move_to(&mut p, dist, z_b);
                }
                _ => {
                    let range = mat.csda_range(p.species, t_mev)?.min(dist);
                    p.position += p.direction * range;
                    self.stop_charged(p, i);
                    return Ok(());
                }
            }
        }
    }

    fn neutron(&mut self, mut p: Particle) {
        loop {
            let Some(i) = self.geom.locate(p.position.z, p.direction.z) else {
                self.exit(p);
                return;
            };
            let layer = &self.geom.layers[i];
            let sigma = self.cfg.neutron_removal_cm2_per_g * layer.material.density;
            let (dist, z_b) = self.to_boundary(i, &p);
            let survive = (-sigma * dist).exp();
            if self.rng.random::<f64>() >= survive {
                self.out.deposits_kev[i] += p.energy_kev;
                return;
            }
            Self::move_to(&mut p, dist, z_b);
        }
    }
}

/// Transport any supported species through the slabs.
pub fn transport<R: Rng + ?Sized>(
    record: &PhaseSpaceRecord,
    geom: &SlabGeometry,
    rng: &mut R,
    cfg: &TransportConfig,
) -> Result<TransportOutcome> {
    record.validate()?;
    let engine =
        Engine { geom, cfg, rng, out: TransportOutcome::new(geom.layers.len()), stack: Vec::new(), template: *record };
    engine.run(Particle {
        species: record.species,
        energy_kev: record.energy_kev,
        position: record.position,
        direction: record.direction,
    })
}

/// Track one photon and its secondaries.
pub fn transport_photon<R: Rng + ?Sized>(
    record: &PhaseSpaceRecord,
    geom: &SlabGeometry,
    rng: &mut R,
    cfg: &TransportConfig,
) -> Result<TransportOutcome> {
    if record.species != Species::Photon {
        return Err(Error::UnsupportedSpecies { species: record.species.name(), operation: "photon transport" });
    }
    transport(record, geom, rng, cfg)
}

/// Slow a charged particle down through the slabs.
pub fn transport_charged<R: Rng + ?Sized>(
    record: &PhaseSpaceRecord,
    geom: &SlabGeometry,
    rng: &mut R,
    cfg: &TransportConfig,
) -> Result<TransportOutcome> {
    if !record.species.is_charged() {
        return Err(Error::UnsupportedSpecies {
            species: record.species.name(),
            operation: "charged-particle transport",
        });
    }
    transport(record, geom, rng, cfg)
}

/// Result of a slab run: escaping particles plus layer bookkeeping.
#[derive(Debug, Clone)]
pub struct SlabRun {
    pub phase_space: PhaseSpace,
    /// keV deposited per layer over the whole run.
    pub layer_deposits_kev: Vec<f64>,
}

/// Square generation region of side `side_cm` centred on the z axis.
fn lateral_point<R: Rng + ?Sized>(side_cm: f64, rng: &mut R) -> (f64, f64) {
    ((rng.random::<f64>() - 0.5) * side_cm, (rng.random::<f64>() - 0.5) * side_cm)
}

/// Decay `n_decays` parents uniformly inside layer `emitter`, emitting each
/// chain's gamma lines isotropically, and keep what leaves through the top.
///
/// The effective time is `n_decays / (total activity × emitter mass)`.
/// History ids start at `first_history`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_slab_emission<R: Rng + ?Sized>(
    library: &LineLibrary,
    activities: &ChainActivities,
    geom: &SlabGeometry,
    emitter: usize,
    side_cm: f64,
    n_decays: u64,
    first_history: u64,
    rng: &mut R,
    cfg: &TransportConfig,
) -> Result<SlabRun> {
    let total = activities.total();
    if !(total > 0.0) {
        return Err(Error::invalid("total activity is zero; nothing to emit"));
    }
    if n_decays == 0 {
        return Err(Error::invalid("number of decays must be > 0"));
    }
    let layer =
        geom.layers().get(emitter).ok_or_else(|| Error::invalid(format!("no layer {emitter} in slab geometry")))?;
    if !(layer.thickness_cm > 0.0) || !(side_cm > 0.0) {
        return Err(Error::invalid("emitting layer and generation area must be non-empty"));
    }
    let mass_kg = layer.material.density * side_cm * side_cm * layer.thickness_cm / 1000.0;
    let mut ps = PhaseSpace::new(n_decays as f64 / (total * mass_kg), side_cm * side_cm);
    let mut deposits = vec![0.0; geom.layers().len()];
    let (lo, hi) = geom.bounds(emitter);
    let mut lines = Vec::new();
    for k in 0..n_decays {
        let history = first_history + k;
        let chain = {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = crate::sources::ChainId::ALL[4];
            for (id, a) in activities.iter() {
                acc += a;
                if u < acc {
                    pick = id;
                    break;
                }
            }
            library.chain(pick)
        };
        lines.clear();
        chain.sample_emission_into(rng, &mut lines);
        if lines.is_empty() {
            continue;
        }
        let (x, y) = lateral_point(side_cm, rng);
        let z = lo + (hi - lo) * rng.random::<f64>();
        for &e in &lines {
            let mut rec = PhaseSpaceRecord::new(Species::Photon, e, Vec3::new(x, y, z), Vec3::isotropic(rng));
            rec.history = history;
            let out = transport(&rec, geom, rng, cfg)?;
            for (d, o) in deposits.iter_mut().zip(&out.deposits_kev) {
                *d += o;
            }
            ps.records.extend(out.exiting.into_iter().filter(|r| r.direction.z > 0.0 && r.position.z >= geom.z_top()));
        }
    }
    Ok(SlabRun { phase_space: ps, layer_deposits_kev: deposits })
}

/// Send `n` cosmic primaries down through the slabs from the source's
/// generation plane and keep what leaves through the bottom.
pub fn simulate_cosmic_shielding<R: Rng + ?Sized>(
    source: &CosmicSource,
    geom: &SlabGeometry,
    n: u64,
    first_history: u64,
    rng: &mut R,
    cfg: &TransportConfig,
) -> Result<SlabRun> {
    if n == 0 {
        return Err(Error::invalid("number of primaries must be > 0"));
    }
    let plane = source.plane();
    let mut ps = PhaseSpace::new(source.effective_time(n), plane.area_cm2());
    let mut deposits = vec![0.0; geom.layers().len()];
    for k in 0..n {
        let mut rec = source.sample(rng);
        rec.history = first_history + k;
        let out = transport(&rec, geom, rng, cfg)?;
        for (d, o) in deposits.iter_mut().zip(&out.deposits_kev) {
            *d += o;
        }
        ps.records.extend(out.exiting.into_iter().filter(|r| r.direction.z < 0.0 && r.position.z <= geom.z_bottom()));
    }
    Ok(SlabRun { phase_space: ps, layer_deposits_kev: deposits })
}
