use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::phase_space::PhaseSpaceRecord;
use crate::species::Species;

/// Shape of a differential energy spectrum dN/dE (arbitrary normalisation).
/// Energies in MeV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumShape {
    /// E^-index, optionally times exp(-E/cutoff).
    PowerLaw { index: f64, cutoff_mev: Option<f64> },
    /// E^-index_low below `break_mev`, continuous E^-index_high above.
    BrokenPowerLaw { break_mev: f64, index_low: f64, index_high: f64 },
    /// Sea-level muon form (E + shift)^-index with the pion and kaon
    /// production terms.
    Muon { index: f64, shift_mev: f64 },
}

impl SpectrumShape {
    pub fn density(&self, e_mev: f64) -> f64 {
        match *self {
            SpectrumShape::PowerLaw { index, cutoff_mev } => {
                let base = e_mev.powf(-index);
                match cutoff_mev {
                    Some(c) => base * (-e_mev / c).exp(),
                    None => base,
                }
            }
            SpectrumShape::BrokenPowerLaw { break_mev, index_low, index_high } => {
                if e_mev < break_mev {
                    (e_mev / break_mev).powf(-index_low)
                } else {
                    (e_mev / break_mev).powf(-index_high)
                }
            }
            SpectrumShape::Muon { index, shift_mev } => {
                let e = e_mev + shift_mev;
                let gev = e / 1000.0;
                gev.powf(-index) * (1.0 / (1.0 + 1.1 * gev / 115.0) + 0.054 / (1.0 + 1.1 * gev / 850.0))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectrumShape::PowerLaw { index, cutoff_mev } => index.is_finite() && cutoff_mev.is_none_or(|c| c > 0.0),
            SpectrumShape::BrokenPowerLaw { break_mev, index_low, index_high } => {
                break_mev > 0.0 && index_low.is_finite() && index_high.is_finite()
            }
            SpectrumShape::Muon { index, shift_mev } => index > 0.0 && shift_mev >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid spectrum parameters {self:?}")))
        }
    }
}

/// Inverse-CDF sampler for a [`SpectrumShape`] restricted to an energy range,
/// tabulated on a fine logarithmic grid.
#[derive(Debug, Clone)]
pub struct EnergySampler {
    ln_e: Vec<f64>,
    cdf: Vec<f64>,
    mean_mev: f64,
}

const SAMPLER_NODES: usize = 4097;

impl EnergySampler {
    pub fn new(shape: &SpectrumShape, e_min_mev: f64, e_max_mev: f64) -> Result<Self> {
        shape.validate()?;
        if !(e_min_mev > 0.0 && e_max_mev > e_min_mev) {
            return Err(Error::invalid("spectrum range needs 0 < e_min < e_max"));
        }
        let (a, b) = (e_min_mev.ln(), e_max_mev.ln());
        let h = (b - a) / (SAMPLER_NODES - 1) as f64;
        let ln_e: Vec<f64> = (0..SAMPLER_NODES).map(|i| a + h * i as f64).collect();
        // density per unit ln E
        let f: Vec<f64> = ln_e
            .iter()
            .map(|&u| {
                let e = u.exp();
                shape.density(e) * e
            })
            .collect();
        if f.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("spectrum density must be finite and >= 0 on its range"));
        }
        let mut cdf = Vec::with_capacity(SAMPLER_NODES);
        let mut first = 0.0;
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..SAMPLER_NODES {
            let seg = 0.5 * (f[i - 1] + f[i]) * h;
            acc += seg;
            first += 0.5 * (f[i - 1] * ln_e[i - 1].exp() + f[i] * ln_e[i].exp()) * h;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::invalid("spectrum integrates to zero over its range"));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(EnergySampler { ln_e, cdf, mean_mev: first / acc })
    }

    pub fn e_min(&self) -> f64 {
        self.ln_e[0].exp()
    }

    pub fn e_max(&self) -> f64 {
        self.ln_e[self.ln_e.len() - 1].exp()
    }

    /// Mean energy of the tabulated distribution (MeV).
    pub fn mean_mev(&self) -> f64 {
        self.mean_mev
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        (self.ln_e[i - 1] + t * (self.ln_e[i] - self.ln_e[i - 1])).exp()
    }
}

/// Sea-level description of one cosmic-ray species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosmicSpeciesModel {
    pub species: Species,
    pub enabled: bool,
    /// Particles crossing a horizontal plane at sea level (cm⁻² s⁻¹), over
    /// the configured energy range.
    pub integral_flux: f64,
    pub spectrum: SpectrumShape,
    pub e_min_mev: f64,
    pub e_max_mev: f64,
    /// Intensity per solid angle falls as cos^n of the zenith angle.
    pub zenith_exponent: f64,
    /// Elevation for an e-fold flux increase (m).
    pub scale_height_m: f64,
}

impl CosmicSpeciesModel {
    pub fn elevation_factor(&self, elevation_m: f64) -> f64 {
        (elevation_m / self.scale_height_m).exp()
    }

    /// Crossing flux at the given elevation (cm⁻² s⁻¹).
    pub fn flux_at(&self, elevation_m: f64) -> f64 {
        self.integral_flux * self.elevation_factor(elevation_m)
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.species;
        if !(self.integral_flux >= 0.0) || !self.integral_flux.is_finite() {
            return Err(Error::invalid(format!("{name}: integral flux must be >= 0")));
        }
        if !(self.scale_height_m > 0.0) {
            return Err(Error::invalid(format!("{name}: scale height must be > 0")));
        }
        if !(self.zenith_exponent >= 0.0) {
            return Err(Error::invalid(format!("{name}: zenith exponent must be >= 0")));
        }
        if !(self.e_min_mev > 0.0 && self.e_max_mev > self.e_min_mev) {
            return Err(Error::invalid(format!("{name}: energy range needs 0 < min < max")));
        }
        self.spectrum.validate()
    }
}

/// Per-species models for all seven species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosmicModel {
    pub species: Vec<CosmicSpeciesModel>,
}

impl Default for CosmicModel {
    fn default() -> Self {
        Self::sea_level()
    }
}

impl CosmicModel {
    /// Simplified sea-level defaults. Integral fluxes are crossing rates
    /// through a horizontal plane above each species' lower energy bound.
    pub fn sea_level() -> Self {
        let muon = SpectrumShape::Muon { index: 2.7, shift_mev: 2000.0 };
        let em = |index| SpectrumShape::PowerLaw { index, cutoff_mev: Some(3000.0) };
        let nuclear = SpectrumShape::BrokenPowerLaw { break_mev: 1000.0, index_low: 1.0, index_high: 2.7 };
        let m = |species, flux, spectrum, lo, n, lambda| CosmicSpeciesModel {
            species,
            enabled: true,
            integral_flux: flux,
            spectrum,
            e_min_mev: lo,
            e_max_mev: 1.0e5,
            zenith_exponent: n,
            scale_height_m: lambda,
        };
        CosmicModel {
            species: vec![
                m(Species::MuonMinus, 0.0074, muon.clone(), 100.0, 2.0, 5000.0),
                m(Species::MuonPlus, 0.0093, muon, 100.0, 2.0, 5000.0),
                m(Species::Electron, 0.0025, em(2.0), 10.0, 3.0, 2500.0),
                m(Species::Positron, 0.0022, em(2.0), 10.0, 3.0, 2500.0),
                m(Species::Photon, 0.0080, em(1.7), 1.0, 3.0, 2500.0),
                m(Species::Neutron, 0.0036, nuclear.clone(), 10.0, 3.0, 1000.0),
                m(Species::Proton, 0.0003, nuclear, 50.0, 3.0, 1000.0),
            ],
        }
    }

    pub fn get(&self, species: Species) -> Option<&CosmicSpeciesModel> {
        self.species.iter().find(|m| m.species == species)
    }

    pub fn get_mut(&mut self, species: Species) -> Option<&mut CosmicSpeciesModel> {
        self.species.iter_mut().find(|m| m.species == species)
    }

    /// Disable every species not in `keep`.
    pub fn only(mut self, keep: &[Species]) -> Self {
        for m in &mut self.species {
            m.enabled = keep.contains(&m.species);
        }
        self
    }

    pub fn enabled(&self) -> impl Iterator<Item = &CosmicSpeciesModel> {
        self.species.iter().filter(|m| m.enabled)
    }

    /// Summed crossing flux of enabled species at the elevation (cm⁻² s⁻¹).
    pub fn total_flux(&self, elevation_m: f64) -> f64 {
        self.enabled().map(|m| m.flux_at(elevation_m)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.species.iter().enumerate() {
            m.validate()?;
            if self.species[..i].iter().any(|o| o.species == m.species) {
                return Err(Error::invalid(format!("species {} configured twice", m.species)));
            }
        }
        Ok(())
    }
}

/// Square plane, centred on the z axis, on which primaries start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationPlane {
    pub z_cm: f64,
    pub side_cm: f64,
}

impl GenerationPlane {
    pub fn area_cm2(&self) -> f64 {
        self.side_cm * self.side_cm
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        let x = (rng.random::<f64>() - 0.5) * self.side_cm;
        let y = (rng.random::<f64>() - 0.5) * self.side_cm;
        Vec3::new(x, y, self.z_cm)
    }
}

#[derive(Debug, Clone)]
struct SpeciesSampler {
    species: Species,
    cumulative: f64,
    energy: EnergySampler,
    inv_cos_power: f64,
}

/// Ready-to-sample cosmic-ray generator for one elevation.
#[derive(Debug, Clone)]
pub struct CosmicSource {
    samplers: Vec<SpeciesSampler>,
    total_flux: f64,
    plane: GenerationPlane,
}

impl CosmicSource {
    pub fn new(model: &CosmicModel, elevation_m: f64, plane: GenerationPlane) -> Result<Self> {
        model.validate()?;
        if !(elevation_m >= 0.0) {
            return Err(Error::invalid("elevation must be >= 0"));
        }
        if !(plane.side_cm > 0.0) {
            return Err(Error::invalid("generation plane side must be > 0"));
        }
        let mut samplers = Vec::new();
        let mut acc = 0.0;
        for m in model.enabled() {
            let flux = m.flux_at(elevation_m);
            if flux <= 0.0 {
                continue;
            }
            acc += flux;
            samplers.push(SpeciesSampler {
                species: m.species,
                cumulative: acc,
                energy: EnergySampler::new(&m.spectrum, m.e_min_mev, m.e_max_mev)?,
                // crossing density in cosθ goes as cos^(n+1), so the CDF is cos^(n+2)
                inv_cos_power: 1.0 / (m.zenith_exponent + 2.0),
            });
        }
        if samplers.is_empty() {
            return Err(Error::invalid("no cosmic-ray species enabled with nonzero flux"));
        }
        Ok(CosmicSource { samplers, total_flux: acc, plane })
    }

    /// Crossing flux of all generated species (cm⁻² s⁻¹).
    pub fn total_flux(&self) -> f64 {
        self.total_flux
    }

    pub fn plane(&self) -> GenerationPlane {
        self.plane
    }

    /// Exposure time represented by `n` primaries on the generation plane.
    pub fn effective_time(&self, n: u64) -> f64 {
        n as f64 / (self.total_flux * self.plane.area_cm2())
    }

    /// Probability of each generated species.
    pub fn species_fractions(&self) -> Vec<(Species, f64)> {
        let mut prev = 0.0;
        self.samplers
            .iter()
            .map(|s| {
                let p = (s.cumulative - prev) / self.total_flux;
                prev = s.cumulative;
                (s.species, p)
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhaseSpaceRecord {
        let u = rng.random::<f64>() * self.total_flux;
        let k = self.samplers.partition_point(|s| s.cumulative <= u).min(self.samplers.len() - 1);
        let s = &self.samplers[k];
        let energy_kev = s.energy.sample(rng) * 1000.0;
        // cosθ > 0 strictly so the record is always downgoing
        let cos_t = (1.0 - rng.random::<f64>()).powf(s.inv_cos_power);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let direction = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), -cos_t);
        let position = self.plane.sample_point(rng);
        PhaseSpaceRecord::new(s.species, energy_kev, position, direction)
    }
}

/// Draw one primary from `source`.
pub fn sample_cosmic_primary<R: Rng + ?Sized>(source: &CosmicSource, rng: &mut R) -> PhaseSpaceRecord {
    source.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane() -> GenerationPlane {
        GenerationPlane { z_cm: 0.0, side_cm: 100.0 }
    }

    #[test]
    fn sea_level_species_fractions() {
        let model = CosmicModel::sea_level();
        let src = CosmicSource::new(&model, 0.0, plane()).unwrap();
        let total: f64 = model.species.iter().map(|m| m.integral_flux).sum();
        let n = 200_000;
        let mut counts = std::collections::HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..n {
            *counts.entry(src.sample(&mut rng).species).or_insert(0u32) += 1;
        }
        for m in &model.species {
            let p = m.integral_flux / total;
            let got = counts.get(&m.species).copied().unwrap_or(0) as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((got - n as f64 * p).abs() < 3.0 * sigma, "{}: {got} vs {}", m.species, n as f64 * p);
        }
    }

    #[test]
    fn elevation_scaling_is_exponential() {
        let model = CosmicModel::sea_level().only(&[Species::MuonMinus, Species::MuonPlus]);
        let f0 = model.total_flux(0.0);
        let f1 = model.total_flux(5000.0);
        assert!((f1 / f0 - std::f64::consts::E).abs() < 1e-12);

        let full = CosmicModel::sea_level();
        let ratio = |h: f64| {
            let nuc: f64 = full.enabled().filter(|m| m.species.is_nuclear()).map(|m| m.flux_at(h)).sum();
            let mu: f64 = full.enabled().filter(|m| m.species.is_muon()).map(|m| m.flux_at(h)).sum();
            nuc / mu
        };
        assert!((ratio(3000.0) / ratio(0.0) - 2.4f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn records_are_downgoing_and_in_range() {
        let src = CosmicSource::new(&CosmicModel::sea_level(), 1500.0, plane()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20_000 {
            let r = src.sample(&mut rng);
            r.validate().unwrap();
            assert!(r.direction.z < 0.0);
            assert!(r.position.x.abs() <= 50.0 && r.position.y.abs() <= 50.0);
            assert!(r.energy_kev >= 1000.0 && r.energy_kev <= 1.0e8);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let src = CosmicSource::new(&CosmicModel::sea_level(), 0.0, plane()).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| src.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn zenith_law_matches_moments() {
        // crossing density ∝ cos^(n+1): E[cos] = (n+2)/(n+3); n = 2 gives 0.8
        let model = CosmicModel::sea_level().only(&[Species::MuonMinus]);
        let src = CosmicSource::new(&model, 0.0, plane()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| -src.sample(&mut rng).direction.z).sum::<f64>() / n as f64;
        // σ(cos) = sqrt(4/6 - 0.64) ≈ 0.163
        assert!((mean - 0.8).abs() < 3.0 * 0.1633 / (n as f64).sqrt());
    }

    #[test]
    fn energy_sampler_matches_power_law_mean() {
        // E^-2 on [1, 100]: mean = ln(100) / (1 - 1/100)
        let s = EnergySampler::new(&SpectrumShape::PowerLaw { index: 2.0, cutoff_mev: None }, 1.0, 100.0).unwrap();
        let exact = 100f64.ln() / 0.99;
        assert!((s.mean_mev() - exact).abs() / exact < 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - exact).abs() < 3.0 * (var / n as f64).sqrt());
        assert!(xs.iter().all(|&x| (1.0..=100.0).contains(&x)));
    }

    #[test]
    fn rejects_invalid_models() {
        let none = CosmicModel::sea_level().only(&[]);
        assert!(CosmicSource::new(&none, 0.0, plane()).is_err());
        let mut bad = CosmicModel::sea_level();
        bad.species[0].scale_height_m = 0.0;
        assert!(bad.validate().is_err());
        let mut dup = CosmicModel::sea_level();
        dup.species.push(dup.species[0].clone());
        assert!(dup.validate().is_err());
    }
}
