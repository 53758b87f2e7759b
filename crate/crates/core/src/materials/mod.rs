//! Material definitions with photon attenuation and charged-particle
//! stopping-power tables.
//!
//! Tables are embedded CSV files (see `data/`), one per material and table
//! kind. Photon tables span 1 keV to 10 MeV; stopping tables span 0.01 MeV
//! to 100 GeV. Both are interpolated log-log and never extrapolated.

mod elements;
mod table;

use std::sync::{Arc, OnceLock};

use serde::Serialize;

pub use elements::{DensityEffect, Element};
pub use table::{DataCsv, LogLogTable};

use crate::error::{Error, Result};
use crate::species::Species;

/// Density of silicon (g/cm³); reference for relative densities.
pub const SILICON_DENSITY: f64 = 2.329;

/// Photon interaction processes carried by the attenuation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Process {
    Photoelectric,
    Compton,
    Pair,
    Total,
}

#[derive(Debug, Clone)]
struct PhotonTables {
    photoelectric: LogLogTable,
    compton: LogLogTable,
    /// Starts at the first tabulated energy above pair threshold.
    pair: Option<LogLogTable>,
}

/// Mass stopping power plus the CSDA range and its inverse for one species.
#[derive(Debug, Clone)]
struct ChargedTable {
    stopping: LogLogTable,
    range: LogLogTable,
    energy_at_range: LogLogTable,
}

impl ChargedTable {
    fn new(stopping: LogLogTable) -> Result<Self> {
        let e = stopping.grid();
        let s = stopping.values();
        // below the first node assume the local power law continues to zero
        let k0 = (s[1] / s[0]).ln() / (e[1] / e[0]).ln();
        let mut r = vec![e[0] / (s[0] * (1.0 - k0).max(0.1))];
        for i in 1..e.len() {
            // exact integral of dE / S over a power-law segment S = s_a (E/e_a)^k
            let k = (s[i] / s[i - 1]).ln() / (e[i] / e[i - 1]).ln();
            let seg = if (1.0 - k).abs() < 1e-9 {
                e[i - 1] / s[i - 1] * (e[i] / e[i - 1]).ln()
            } else {
                e[i - 1].powf(k) / s[i - 1] * (e[i].powf(1.0 - k) - e[i - 1].powf(1.0 - k)) / (1.0 - k)
            };
            r.push(r[i - 1] + seg);
        }
        let range = LogLogTable::new(e.to_vec(), r.clone())?;
        let energy_at_range = LogLogTable::new(r, e.to_vec())?;
        Ok(ChargedTable { stopping, range, energy_at_range })
    }
}

#[derive(Debug, Clone)]
struct StoppingTables {
    electron: ChargedTable,
    positron: ChargedTable,
    muon: ChargedTable,
    proton: ChargedTable,
}

/// One substrate or shielding material. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MaterialDef {
    pub name: String,
    /// g/cm³
    pub density: f64,
    /// density / silicon density
    pub relative_density: f64,
    /// (element, mass fraction)
    pub composition: Vec<(Element, f64)>,
    pub contains_gallium: bool,
    pub mean_excitation_ev: f64,
    z_over_a: f64,
    density_effect: DensityEffect,
    photon: PhotonTables,
    stopping: StoppingTables,
}

impl MaterialDef {
    /// Build from a catalog entry and the text of its attenuation and
    /// stopping CSV files.
    pub fn from_tables(
        name: &str,
        density: f64,
        mean_excitation_ev: f64,
        composition: Vec<(Element, f64)>,
        attenuation_csv: &str,
        stopping_csv: &str,
    ) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::invalid(format!("{name}: density must be > 0")));
        }
        let total: f64 = composition.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!("{name}: mass fractions sum to {total}, not 1")));
        }
        let z_over_a = composition.iter().map(|(e, w)| w * e.z_over_a()).sum();

        let att_name = format!("{name}_attenuation.csv");
        let att = DataCsv::parse(&att_name, attenuation_csv)?;
        check_header(&att, &att_name, name, "attenuation")?;
        let photon = PhotonTables {
            photoelectric: att.table(&att_name, 1)?,
            compton: att.table(&att_name, 2)?,
            pair: att.positive_table(&att_name, 3)?,
        };

        let stop_name = format!("{name}_stopping.csv");
        let stop = DataCsv::parse(&stop_name, stopping_csv)?;
        check_header(&stop, &stop_name, name, "stopping")?;
        let stopping = StoppingTables {
            electron: ChargedTable::new(stop.table(&stop_name, 1)?)?,
            positron: ChargedTable::new(stop.table(&stop_name, 2)?)?,
            muon: ChargedTable::new(stop.table(&stop_name, 3)?)?,
            proton: ChargedTable::new(stop.table(&stop_name, 4)?)?,
        };

        Ok(MaterialDef {
            name: name.to_string(),
            density,
            relative_density: density / SILICON_DENSITY,
            contains_gallium: composition.iter().any(|(e, _)| e.symbol == "Ga"),
            composition,
            mean_excitation_ev,
            z_over_a,
            density_effect: DensityEffect::for_medium(density, z_over_a, mean_excitation_ev),
            photon,
            stopping,
        })
    }

    /// Mean Z/A (mol/g).
    pub fn z_over_a(&self) -> f64 {
        self.z_over_a
    }

    pub fn density_effect(&self) -> &DensityEffect {
        &self.density_effect
    }

    pub fn photon_energy_range(&self) -> (f64, f64) {
        (self.photon.compton.x_min(), self.photon.compton.x_max())
    }

    /// Kinetic-energy range (MeV) of the stopping tables.
    pub fn charged_energy_range(&self) -> (f64, f64) {
        (self.stopping.electron.stopping.x_min(), self.stopping.electron.stopping.x_max())
    }

    /// Mass attenuation coefficient μ/ρ (cm²/g).
    pub fn mass_attenuation(&self, energy_kev: f64, process: Process) -> Result<f64> {
        let [pe, co, pa] = self.mass_attenuation_parts(energy_kev)?;
        Ok(match process {
            Process::Photoelectric => pe,
            Process::Compton => co,
            Process::Pair => pa,
            Process::Total => pe + co + pa,
        })
    }

    /// Per-process μ/ρ: `[photoelectric, compton, pair]`.
    pub fn mass_attenuation_parts(&self, energy_kev: f64) -> Result<[f64; 3]> {
        let (lo, hi) = self.photon_energy_range();
        let out = || Error::OutOfDomain { quantity: "photon energy (keV)", value: energy_kev, min: lo, max: hi };
        let pe = self.photon.photoelectric.eval(energy_kev).ok_or_else(out)?;
        let co = self.photon.compton.eval(energy_kev).ok_or_else(out)?;
        let pa = match &self.photon.pair {
            Some(t) if energy_kev >= t.x_min() => t.eval(energy_kev).ok_or_else(out)?,
            _ => 0.0,
        };
        Ok([pe, co, pa])
    }

    /// Linear attenuation coefficients `[photoelectric, compton, pair]` (cm⁻¹).
    pub fn attenuation_parts(&self, energy_kev: f64) -> Result<[f64; 3]> {
        Ok(self.mass_attenuation_parts(energy_kev)?.map(|m| m * self.density))
    }

    /// Linear attenuation coefficient μ (cm⁻¹).
    pub fn attenuation_coefficient(&self, energy_kev: f64, process: Process) -> Result<f64> {
        Ok(self.mass_attenuation(energy_kev, process)? * self.density)
    }

    fn charged(&self, species: Species) -> Result<&ChargedTable> {
        Ok(match species {
            Species::Electron => &self.stopping.electron,
            Species::Positron => &self.stopping.positron,
            Species::MuonMinus | Species::MuonPlus => &self.stopping.muon,
            Species::Proton => &self.stopping.proton,
            Species::Photon | Species::Neutron => {
                return Err(Error::UnsupportedSpecies { species: species.name(), operation: "stopping power" })
            }
        })
    }

    fn kinetic_out_of_domain(&self, kinetic_mev: f64) -> Error {
        let (lo, hi) = self.charged_energy_range();
        Error::OutOfDomain { quantity: "kinetic energy (MeV)", value: kinetic_mev, min: lo, max: hi }
    }

    /// Mass stopping power (MeV·cm²/g).
    pub fn mass_stopping_power(&self, species: Species, kinetic_mev: f64) -> Result<f64> {
        self.charged(species)?.stopping.eval(kinetic_mev).ok_or_else(|| self.kinetic_out_of_domain(kinetic_mev))
    }

    /// Linear stopping power dE/dx (MeV/cm).
    pub fn stopping_power(&self, species: Species, kinetic_mev: f64) -> Result<f64> {
        Ok(self.mass_stopping_power(species, kinetic_mev)? * self.density)
    }

    /// CSDA range (cm).
    pub fn csda_range(&self, species: Species, kinetic_mev: f64) -> Result<f64> {
        self.charged(species)?
            .range
            .eval(kinetic_mev)
            .map(|r| r / self.density)
            .ok_or_else(|| self.kinetic_out_of_domain(kinetic_mev))
    }

    /// Kinetic energy (MeV) left after a straight CSDA path of `path_cm`,
    /// or `None` when the particle stops within it (or drops below the
    /// table floor).
    pub fn energy_after_path(&self, species: Species, kinetic_mev: f64, path_cm: f64) -> Result<Option<f64>> {
        let table = self.charged(species)?;
        let range = table.range.eval(kinetic_mev).ok_or_else(|| self.kinetic_out_of_domain(kinetic_mev))?;
        let left = range - path_cm * self.density;
        if left <= table.range.values()[0] {
            return Ok(None);
        }
        Ok(table.energy_at_range.eval(left).map(|e| e.min(kinetic_mev)))
    }
}

fn check_header(csv: &DataCsv, source: &str, name: &str, kind: &str) -> Result<()> {
    if csv.require(source, "material")? != name {
        return Err(Error::table(source, "material name in header does not match"));
    }
    if csv.require(source, "kind")? != kind {
        return Err(Error::table(source, format!("expected kind={kind}")));
    }
    csv.require(source, "species")?;
    csv.require(source, "units")?;
    Ok(())
}

/// Linear attenuation coefficient μ (cm⁻¹) of `material` at `energy_kev`.
pub fn attenuation_coefficient(material: &MaterialDef, energy_kev: f64, process: Process) -> Result<f64> {
    material.attenuation_coefficient(energy_kev, process)
}

/// Linear stopping power dE/dx (MeV/cm).
pub fn stopping_power(material: &MaterialDef, species: Species, kinetic_mev: f64) -> Result<f64> {
    material.stopping_power(species, kinetic_mev)
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(
            (
                $name,
                include_str!(concat!("../../data/", $name, "_attenuation.csv")),
                include_str!(concat!("../../data/", $name, "_stopping.csv")),
            ),
        )*]
    };
}

const EMBEDDED: &[(&str, &str, &str)] = embedded!["Si", "SiC", "SiO2", "Al2O3", "GaN", "GaAs", "concrete", "Al"];
const CATALOG: &str = include_str!("../../data/materials.csv");

/// The set of built-in materials.
#[derive(Debug)]
pub struct MaterialLibrary {
    materials: Vec<Arc<MaterialDef>>,
}

impl MaterialLibrary {
    /// Parses the embedded tables once per process.
    pub fn builtin() -> &'static MaterialLibrary {
        static LIB: OnceLock<MaterialLibrary> = OnceLock::new();
        LIB.get_or_init(|| Self::load_embedded().expect("embedded material tables are valid"))
    }

    fn load_embedded() -> Result<Self> {
        let mut materials = Vec::new();
        for (lineno, line) in CATALOG.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("name,") {
                continue;
            }
            let err = |m: &str| Error::table("materials.csv", format!("line {}: {m}", lineno + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(err("expected 4 fields"));
            }
            let name = fields[0];
            let density: f64 = fields[1].parse().map_err(|_| err("bad density"))?;
            let mean_ex: f64 = fields[2].parse().map_err(|_| err("bad mean excitation"))?;
            let mut composition = Vec::new();
            for part in fields[3].split_whitespace() {
                let (sym, w) = part.split_once(':').ok_or_else(|| err("bad composition"))?;
                let el = Element::by_symbol(sym).ok_or_else(|| err("unknown element"))?;
                composition.push((el, w.parse().map_err(|_| err("bad mass fraction"))?));
            }
            let (_, att, stop) =
                EMBEDDED.iter().find(|(n, _, _)| *n == name).ok_or_else(|| err("no embedded tables"))?;
            materials.push(Arc::new(MaterialDef::from_tables(name, density, mean_ex, composition, att, stop)?));
        }
        Ok(MaterialLibrary { materials })
    }

    pub fn names(&self) -> Vec<String> {
        self.materials.iter().map(|m| m.name.clone()).collect()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Result<Arc<MaterialDef>> {
        self.materials
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name))
            .cloned()
            .ok_or_else(|| Error::UnknownMaterial { name: name.to_string(), known: self.names() })
    }
}

/// Shorthand for `MaterialLibrary::builtin().get(name)`.
pub fn material(name: &str) -> Result<Arc<MaterialDef>> {
    MaterialLibrary::builtin().get(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_loads_all_materials() {
        let lib = MaterialLibrary::builtin();
        assert_eq!(lib.names(), ["Si", "SiC", "SiO2", "Al2O3", "GaN", "GaAs", "concrete", "Al"]);
        for name in lib.names() {
            let m = lib.get(&name).unwrap();
            let sum: f64 = m.composition.iter().map(|(_, w)| w).sum();
            assert!((sum - 1.0).abs() < 1e-6, "{name}");
            assert!((m.relative_density - m.density / 2.329).abs() < 1e-6);
        }
        assert!(lib.get("gaas").unwrap().contains_gallium);
        assert!(lib.get("GaN").unwrap().contains_gallium);
        assert!(!lib.get("Si").unwrap().contains_gallium);
        assert_eq!(lib.get("concrete").unwrap().density, 2.3);
        assert_eq!(lib.get("Al").unwrap().density, 2.699);
    }

    #[test]
    fn unknown_material_lists_known_names() {
        let err = material("unobtainium").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unobtainium") && msg.contains("GaAs") && msg.contains("concrete"));
    }

    #[test]
    fn attenuation_at_grid_node_is_node_value_times_density() {
        let si = material("Si").unwrap();
        let csv = DataCsv::parse("Si", include_str!("../../data/Si_attenuation.csv")).unwrap();
        for row in csv.rows.iter().step_by(17) {
            let total = row[1] + row[2] + row[3];
            let mu = si.attenuation_coefficient(row[0], Process::Total).unwrap();
            assert!((mu - total * 2.329).abs() <= 1e-12 * mu, "{}", row[0]);
            assert_eq!(si.attenuation_coefficient(row[0], Process::Compton).unwrap(), row[2] * 2.329);
        }
    }

    #[test]
    fn total_is_sum_of_processes() {
        for m in MaterialLibrary::builtin().materials.iter() {
            for i in 0..400 {
                let e = 10f64.powf(i as f64 / 100.0);
                let parts = m.attenuation_parts(e).unwrap();
                let total = m.attenuation_coefficient(e, Process::Total).unwrap();
                let sum: f64 = parts.iter().sum();
                assert!((total - sum).abs() <= 1e-9 * total);
                assert!(parts.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn photon_energy_outside_table_is_an_error() {
        let si = material("Si").unwrap();
        assert!(matches!(si.attenuation_coefficient(0.5, Process::Total), Err(Error::OutOfDomain { .. })));
        assert!(si.attenuation_coefficient(10_001.0, Process::Total).is_err());
        assert!(si.attenuation_coefficient(10_000.0, Process::Total).is_ok());
        assert!(si.attenuation_coefficient(1.0, Process::Total).is_ok());
    }

    #[test]
    fn silicon_one_mev_matches_xcom() {
        // XCOM total (with coherent) for Si at 1 MeV: 6.361e-2 cm²/g.
        let si = material("Si").unwrap();
        let mu_rho = si.mass_attenuation(1000.0, Process::Total).unwrap();
        assert!((mu_rho / 6.361e-2 - 1.0).abs() < 0.02, "{mu_rho}");
    }

    #[test]
    fn pair_only_above_threshold() {
        let c = material("concrete").unwrap();
        assert_eq!(c.mass_attenuation(1000.0, Process::Pair).unwrap(), 0.0);
        assert!(c.mass_attenuation(2000.0, Process::Pair).unwrap() > 0.0);
    }

    #[test]
    fn concrete_attenuation_length_below_chain_maximum() {
        // Attenuation length stays at ~11 cm or less (to two significant
        // figures) up to the 2614.5 keV line, the highest chain energy.
        let c = material("concrete").unwrap();
        for i in 0..=300 {
            let e = 10f64.powf(i as f64 / 300.0 * (2614.5f64).log10());
            let len = 1.0 / c.attenuation_coefficient(e, Process::Total).unwrap();
            assert!(len < 11.5, "{e} keV: {len} cm");
        }
    }

    #[test]
    fn muon_minimum_ionizing_in_silicon() {
        // PDG: minimum mass stopping power of Si is 1.664 MeV cm²/g.
        let si = material("Si").unwrap();
        let dedx = stopping_power(&si, Species::MuonMinus, 300.0).unwrap();
        assert!((dedx / (1.664 * 2.329) - 1.0).abs() < 0.05, "{dedx}");
        assert!((dedx - 3.87).abs() / 3.87 < 0.05);
    }

    #[test]
    fn linear_stopping_scales_with_density() {
        let si = material("Si").unwrap();
        let sio2 = material("SiO2").unwrap();
        let csv = DataCsv::parse("x", include_str!("../../data/SiO2_stopping.csv")).unwrap();
        let row = &csv.rows[120];
        assert_eq!(sio2.stopping_power(Species::Proton, row[0]).unwrap(), row[4] * sio2.density);
        let e = 250.0;
        let ms = si.mass_stopping_power(Species::MuonPlus, e).unwrap();
        let ratio = (ms * sio2.density) / si.stopping_power(Species::MuonPlus, e).unwrap();
        assert!((ratio - sio2.density / si.density).abs() < 1e-12);
    }

    #[test]
    fn stopping_errors() {
        let si = material("Si").unwrap();
        assert!(matches!(si.stopping_power(Species::Photon, 1.0), Err(Error::UnsupportedSpecies { .. })));
        assert!(si.stopping_power(Species::Neutron, 1.0).is_err());
        assert!(si.stopping_power(Species::Electron, 1e-3).is_err());
        assert!(si.stopping_power(Species::Electron, 2e5).is_err());
    }

    #[test]
    fn range_consistent_with_energy_after_path() {
        let al = material("Al").unwrap();
        let e = 2.0;
        let r = al.csda_range(Species::Electron, e).unwrap();
        // fine trapezoid quadrature of 1/S over the same interpolated table
        let (lo, _) = al.charged_energy_range();
        let n = 20_000;
        let h = (e / lo).ln() / n as f64;
        let inv_s = |x: f64| x / al.mass_stopping_power(Species::Electron, x).unwrap();
        let quad: f64 = (0..n)
            .map(|i| {
                let (a, b) = ((lo.ln() + h * i as f64).exp(), (lo.ln() + h * (i + 1) as f64).exp());
                0.5 * (inv_s(a) + inv_s(b)) * h
            })
            .sum();
        let below = al.csda_range(Species::Electron, lo).unwrap() * al.density;
        assert!(((quad + below) / (r * al.density) - 1.0).abs() < 1e-4, "{} {}", quad + below, r * al.density);
        assert!(al.energy_after_path(Species::Electron, e, r * 1.001).unwrap().is_none());
        let half = al.energy_after_path(Species::Electron, e, 0.5 * r).unwrap().unwrap();
        assert!(half > 0.0 && half < e);
        let tiny = al.energy_after_path(Species::Electron, e, 1e-7).unwrap().unwrap();
        let expect = e - al.stopping_power(Species::Electron, e).unwrap() * 1e-7;
        assert!((tiny - expect).abs() < 1e-6);
    }
}
