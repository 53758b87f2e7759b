//! Sectioned key-value configuration.
//!
//! ```text
//! [substrate]
//! material = Si
//! thickness = 500 um
//! ```
//!
//! Every physical value carries a unit. Unknown sections and keys, repeated
//! keys and missing units are errors that name the offending key.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use radbkg::deposition::{DepositConfig, Straggling, SubstrateSpec};
use radbkg::histogram::Binning;
use radbkg::materials::{material, MaterialLibrary};
use radbkg::pipeline::McConfig;
use radbkg::rate_model::{ScaleHeight, SourceId, SourceParams};
use radbkg::sources::{ChainId, CosmicModel, EnvironmentSpec};
use radbkg::species::Species;
use radbkg::transport::TransportConfig;

use crate::units::{parse_count, parse_plain, parse_quantity, Dim};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    /// `section.key`, or empty for whole-file problems.
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (Some(l), false) => write!(f, "config line {l}, `{}`: {}", self.key, self.message),
            (Some(l), true) => write!(f, "config line {l}: {}", self.message),
            (None, false) => write!(f, "config `{}`: {}", self.key, self.message),
            (None, true) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn key(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { line: None, key: key.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstrateConfig {
    pub material: String,
    pub thickness_um: f64,
    pub width_mm: f64,
    pub length_mm: f64,
}

impl Default for SubstrateConfig {
    fn default() -> Self {
        let n = SubstrateSpec::nominal();
        SubstrateConfig {
            material: n.material.name.clone(),
            thickness_um: n.thickness_um,
            width_mm: n.width_mm,
            length_mm: n.length_mm,
        }
    }
}

impl SubstrateConfig {
    pub fn to_spec(&self) -> Result<SubstrateSpec, ConfigError> {
        let m = material(&self.material).map_err(|e| ConfigError::key("substrate.material", e.to_string()))?;
        Ok(SubstrateSpec {
            material: m,
            thickness_um: self.thickness_um,
            width_mm: self.width_mm,
            length_mm: self.length_mm,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    Single,
    Split,
}

/// Both elevation models' settings; `mode` picks the one in use.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleConfig {
    pub mode: ScaleMode,
    pub lambda_m: f64,
    pub muon_m: f64,
    pub nuclear_m: f64,
    pub em_m: f64,
    pub muon_share: f64,
    pub nuclear_share: f64,
    pub em_share: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        let ScaleHeight::Single { lambda_m } = ScaleHeight::default() else { unreachable!() };
        let ScaleHeight::Split { muon_m, nuclear_m, em_m, muon_share, nuclear_share, em_share } =
            ScaleHeight::split_default()
        else {
            unreachable!()
        };
        ScaleConfig { mode: ScaleMode::Single, lambda_m, muon_m, nuclear_m, em_m, muon_share, nuclear_share, em_share }
    }
}

impl ScaleConfig {
    pub fn to_scale_height(&self) -> ScaleHeight {
        match self.mode {
            ScaleMode::Single => ScaleHeight::Single { lambda_m: self.lambda_m },
            ScaleMode::Split => ScaleHeight::Split {
                muon_m: self.muon_m,
                nuclear_m: self.nuclear_m,
                em_m: self.em_m,
                muon_share: self.muon_share,
                nuclear_share: self.nuclear_share,
                em_share: self.em_share,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub histories: u64,
    pub copies: u64,
    pub batch_size: u64,
    pub seed: u64,
    pub floor_cm: f64,
    pub generation_side_cm: f64,
    pub straggling: Straggling,
    pub photon_cutoff_kev: f64,
    pub charged_cutoff_kev: f64,
    pub substrate_photon_cutoff_kev: f64,
    pub substrate_charged_cutoff_kev: f64,
    pub neutron_removal_cm2_per_g: f64,
    pub bins: u64,
    pub bin_min_kev: f64,
    pub bin_max_kev: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        let mc = McConfig::default();
        McSettings {
            histories: mc.histories,
            copies: 8,
            batch_size: mc.batch_size,
            seed: mc.seed,
            floor_cm: mc.floor_concrete_cm,
            generation_side_cm: mc.generation_side_cm,
            straggling: mc.deposit.straggling,
            photon_cutoff_kev: mc.transport.photon_cutoff_kev,
            charged_cutoff_kev: mc.transport.charged_cutoff_kev,
            substrate_photon_cutoff_kev: mc.deposit.photon_cutoff_kev,
            substrate_charged_cutoff_kev: mc.deposit.charged_cutoff_kev,
            neutron_removal_cm2_per_g: mc.transport.neutron_removal_cm2_per_g,
            bins: 200,
            bin_min_kev: 1.0,
            bin_max_kev: 1.0e5,
        }
    }
}

impl McSettings {
    pub fn to_mc(&self, threads: Option<usize>) -> Result<McConfig, ConfigError> {
        let binning = Binning::log(self.bin_min_kev, self.bin_max_kev, self.bins as usize)
            .map_err(|e| ConfigError::key("mc.bins", e.to_string()))?;
        let copies = u32::try_from(self.copies).map_err(|_| ConfigError::key("mc.copies", "too many copies"))?;
        let mc = McConfig {
            histories: self.histories,
            copies,
            batch_size: self.batch_size,
            seed: self.seed,
            threads,
            floor_concrete_cm: self.floor_cm,
            generation_side_cm: self.generation_side_cm,
            keep_phase_space: true,
            transport: TransportConfig {
                photon_cutoff_kev: self.photon_cutoff_kev,
                charged_cutoff_kev: self.charged_cutoff_kev,
                neutron_removal_cm2_per_g: self.neutron_removal_cm2_per_g,
            },
            deposit: DepositConfig {
                straggling: self.straggling,
                photon_cutoff_kev: self.substrate_photon_cutoff_kev,
                charged_cutoff_kev: self.substrate_charged_cutoff_kev,
                binning,
            },
        };
        mc.validate().map_err(|e| ConfigError::key("mc", e.to_string()))?;
        Ok(mc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub prefix: String,
    pub phase_space: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("radbkg-out"), prefix: "run".into(), phase_space: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub substrate: SubstrateConfig,
    pub environment: EnvironmentSpec,
    pub params: SourceParams,
    pub scale: ScaleConfig,
    pub cosmic: CosmicModel,
    pub mc: McSettings,
    pub output: OutputConfig,
}

const SECTIONS: [&str; 6] = ["substrate", "environment", "sources", "cosmic", "mc", "output"];

fn source_key(s: SourceId) -> String {
    s.to_string()
}

fn parse_source(name: &str) -> Option<SourceId> {
    SourceId::ALL.into_iter().find(|s| s.to_string() == name)
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean (true or false)")),
    }
}

impl Config {
    /// Parse and validate a configuration file's text. Keys left out keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut section: Option<&str> = None;
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, message: String| ConfigError { line: Some(line_no), key: key.to_string(), message };
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = Some(SECTIONS.into_iter().find(|s| *s == name).ok_or_else(|| {
                    err("", format!("unknown section [{name}] (expected one of {})", SECTIONS.join(", ")))
                })?);
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| err("", format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.ok_or_else(|| err(key, "key appears before any [section]".into()))?;
            let full = format!("{sec}.{key}");
            if !seen.insert(full.clone()) {
                return Err(err(&full, "key given twice".into()));
            }
            cfg.set(sec, key, value).map_err(|m| err(&full, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<(), String> {
        let q = |dim, unit| parse_quantity(v, dim, unit);
        let unknown = || Err(format!("unknown key `{key}` in [{section}]"));
        match section {
            "substrate" => match key {
                "material" => {
                    let lib = MaterialLibrary::builtin();
                    if lib.get(v).is_err() {
                        return Err(format!("unknown material `{v}` (known materials: {})", lib.names().join(", ")));
                    }
                    self.substrate.material = v.to_string();
                }
                "thickness" => self.substrate.thickness_um = q(Dim::Length, "um")?,
                "width" => self.substrate.width_mm = q(Dim::Length, "mm")?,
                "length" => self.substrate.length_mm = q(Dim::Length, "mm")?,
                _ => return unknown(),
            },
            "environment" => match key {
                "elevation" => self.environment.elevation_m = q(Dim::Length, "m")?,
                "ceiling" => self.environment.ceiling_cm = q(Dim::Length, "cm")?,
                "aluminum" => self.environment.aluminum_cm = q(Dim::Length, "cm")?,
                _ => {
                    let Some(chain) = key.strip_prefix("activity.").and_then(|c| c.parse::<ChainId>().ok()) else {
                        return unknown();
                    };
                    self.environment.activities.0[chain.index()] = q(Dim::Activity, "Bq/kg")?;
                }
            },
            "sources" => self.set_source(key, v)?,
            "cosmic" => self.set_cosmic(key, v)?,
            "mc" => {
                let m = &mut self.mc;
                match key {
                    "histories" => m.histories = parse_count(v)?,
                    "copies" => m.copies = parse_count(v)?,
                    "batch_size" => m.batch_size = parse_count(v)?,
                    "seed" => m.seed = parse_count(v)?,
                    "floor" => m.floor_cm = q(Dim::Length, "cm")?,
                    "generation_side" => m.generation_side_cm = q(Dim::Length, "cm")?,
                    "straggling" => {
                        m.straggling = match v {
                            "landau" => Straggling::Landau,
                            "none" => Straggling::None,
                            _ => return Err(format!("`{v}` is not a straggling model (landau or none)")),
                        }
                    }
                    "photon_cutoff" => m.photon_cutoff_kev = q(Dim::Energy, "keV")?,
                    "charged_cutoff" => m.charged_cutoff_kev = q(Dim::Energy, "keV")?,
                    "substrate_photon_cutoff" => m.substrate_photon_cutoff_kev = q(Dim::Energy, "keV")?,
                    "substrate_charged_cutoff" => m.substrate_charged_cutoff_kev = q(Dim::Energy, "keV")?,
                    "neutron_removal" => m.neutron_removal_cm2_per_g = q(Dim::MassAttenuation, "cm2/g")?,
                    "bins" => m.bins = parse_count(v)?,
                    "bin_min" => m.bin_min_kev = q(Dim::Energy, "keV")?,
                    "bin_max" => m.bin_max_kev = q(Dim::Energy, "keV")?,
                    _ => return unknown(),
                }
            }
            "output" => match key {
                "directory" => self.output.directory = PathBuf::from(v),
                "prefix" => self.output.prefix = v.to_string(),
                "phase_space" => self.output.phase_space = parse_bool(v)?,
                _ => return unknown(),
            },
            _ => unreachable!("sections are checked by the caller"),
        }
        Ok(())
    }

    fn set_source(&mut self, key: &str, v: &str) -> Result<(), String> {
        let q = |dim, unit| parse_quantity(v, dim, unit);
        let p = &mut self.params;
        let s = &mut self.scale;
        match key {
            "scale_height_mode" => {
                s.mode = match v {
                    "single" => ScaleMode::Single,
                    "split" => ScaleMode::Split,
                    _ => return Err(format!("`{v}` is not a scale-height mode (single or split)")),
                }
            }
            "scale_height" => s.lambda_m = q(Dim::Length, "m")?,
            "muon_scale_height" => s.muon_m = q(Dim::Length, "m")?,
            "nuclear_scale_height" => s.nuclear_m = q(Dim::Length, "m")?,
            "em_scale_height" => s.em_m = q(Dim::Length, "m")?,
            "muon_share" => s.muon_share = parse_plain(v)?,
            "nuclear_share" => s.nuclear_share = parse_plain(v)?,
            "em_share" => s.em_share = parse_plain(v)?,
            "cosmic_g_gallium" => p.cosmic_g_gallium = q(Dim::Rate, "/s")?,
            "ceiling_loss_per_10cm" => p.ceiling_loss_per_10cm = parse_plain(v)?,
            "shape_ratio_ref" => p.shape_ratio_ref = parse_plain(v)?,
            "shape_ratio_alt" => p.shape_ratio_alt = parse_plain(v)?,
            "shape_kappa_r_alt" => p.shape_kappa_r_alt = parse_plain(v)?,
            "shape_kappa_p_alt" => p.shape_kappa_p_alt = parse_plain(v)?,
            "m_density_exponent" => p.m_density_exponent = parse_plain(v)?,
            _ => {
                let (src, field) = key.split_once('.').ok_or_else(|| format!("unknown key `{key}` in [sources]"))?;
                let id = parse_source(src).ok_or_else(|| {
                    let names: Vec<String> = SourceId::ALL.iter().map(|s| s.to_string()).collect();
                    format!("unknown source `{src}` (expected one of {})", names.join(", "))
                })?;
                let t = p.term_mut(id);
                match field {
                    "c" => t.c = q(Dim::Rate, "/s")?,
                    "g" => t.g = q(Dim::Rate, "/s")?,
                    "p" => t.p = q(Dim::Power, "keV/s")?,
                    "beta" => t.beta = parse_plain(v)?,
                    "m" => t.m = q(Dim::Rate, "/s")?,
                    "alpha" => t.alpha = parse_plain(v)?,
                    "rho_ga" if id != SourceId::Cosmic => t.rho_ga = Some(q(Dim::Density, "g/cm3")?),
                    _ => return Err(format!("unknown key `{key}` in [sources]")),
                }
            }
        }
        Ok(())
    }

    fn set_cosmic(&mut self, key: &str, v: &str) -> Result<(), String> {
        if key == "species" {
            let mut keep = Vec::new();
            for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                keep.push(name.parse::<Species>().map_err(|e| e.to_string())?);
            }
            self.cosmic = std::mem::take(&mut self.cosmic).only(&keep);
            return Ok(());
        }
        let (sp, field) = key.split_once('.').ok_or_else(|| format!("unknown key `{key}` in [cosmic]"))?;
        let species: Species = sp.parse().map_err(|e: radbkg::error::Error| e.to_string())?;
        let m = self.cosmic.get_mut(species).ok_or_else(|| format!("species {species} has no cosmic-ray model"))?;
        let q = |dim, unit| parse_quantity(v, dim, unit);
        match field {
            "flux" => m.integral_flux = q(Dim::Flux, "/cm2/s")?,
            "scale_height" => m.scale_height_m = q(Dim::Length, "m")?,
            "e_min" => m.e_min_mev = q(Dim::Energy, "MeV")?,
            "e_max" => m.e_max_mev = q(Dim::Energy, "MeV")?,
            "zenith_exponent" => m.zenith_exponent = parse_plain(v)?,
            _ => return Err(format!("unknown key `{key}` in [cosmic]")),
        }
        Ok(())
    }

    /// Check everything that can be checked without running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = self.substrate.to_spec()?;
        s.validate().map_err(|e| ConfigError::key("substrate", e.to_string()))?;
        self.environment.validate().map_err(|e| ConfigError::key("environment", e.to_string()))?;
        self.params.validate().map_err(|e| ConfigError::key("sources", e.to_string()))?;
        self.scale.to_scale_height().validate().map_err(|e| ConfigError::key("sources", e.to_string()))?;
        self.cosmic.validate().map_err(|e| ConfigError::key("cosmic", e.to_string()))?;
        self.mc.to_mc(None)?;
        if self.output.prefix.is_empty() {
            return Err(ConfigError::key("output.prefix", "must not be empty"));
        }
        Ok(())
    }

    /// The full effective configuration in the file format.
    pub fn dump(&self) -> String {
        let mut o = String::new();
        let s = &self.substrate;
        let _ = writeln!(o, "[substrate]");
        let _ = writeln!(o, "material = {}", s.material);
        let _ = writeln!(o, "thickness = {} um", s.thickness_um);
        let _ = writeln!(o, "width = {} mm", s.width_mm);
        let _ = writeln!(o, "length = {} mm", s.length_mm);

        let e = &self.environment;
        let _ = writeln!(o, "\n[environment]");
        let _ = writeln!(o, "elevation = {} m", e.elevation_m);
        let _ = writeln!(o, "ceiling = {} cm", e.ceiling_cm);
        let _ = writeln!(o, "aluminum = {} cm", e.aluminum_cm);
        for c in ChainId::ALL {
            let _ = writeln!(o, "activity.{c} = {} Bq/kg", e.activities.0[c.index()]);
        }

        let sc = &self.scale;
        let p = &self.params;
        let _ = writeln!(o, "\n[sources]");
        let mode = match sc.mode {
            ScaleMode::Single => "single",
            ScaleMode::Split => "split",
        };
        let _ = writeln!(o, "scale_height_mode = {mode}");
        let _ = writeln!(o, "scale_height = {} m", sc.lambda_m);
        let _ = writeln!(o, "muon_scale_height = {} m", sc.muon_m);
        let _ = writeln!(o, "nuclear_scale_height = {} m", sc.nuclear_m);
        let _ = writeln!(o, "em_scale_height = {} m", sc.em_m);
        let _ = writeln!(o, "muon_share = {}", sc.muon_share);
        let _ = writeln!(o, "nuclear_share = {}", sc.nuclear_share);
        let _ = writeln!(o, "em_share = {}", sc.em_share);
        let _ = writeln!(o, "cosmic_g_gallium = {} /s", p.cosmic_g_gallium);
        let _ = writeln!(o, "ceiling_loss_per_10cm = {}", p.ceiling_loss_per_10cm);
        let _ = writeln!(o, "shape_ratio_ref = {}", p.shape_ratio_ref);
        let _ = writeln!(o, "shape_ratio_alt = {}", p.shape_ratio_alt);
        let _ = writeln!(o, "shape_kappa_r_alt = {}", p.shape_kappa_r_alt);
        let _ = writeln!(o, "shape_kappa_p_alt = {}", p.shape_kappa_p_alt);
        let _ = writeln!(o, "m_density_exponent = {}", p.m_density_exponent);
        for id in SourceId::ALL {
            let t = p.term(id);
            let k = source_key(id);
            let _ = writeln!(o, "{k}.c = {} /s", t.c);
            let _ = writeln!(o, "{k}.g = {} /s", t.g);
            let _ = writeln!(o, "{k}.p = {} keV/s", t.p);
            let _ = writeln!(o, "{k}.beta = {}", t.beta);
            let _ = writeln!(o, "{k}.m = {} /s", t.m);
            let _ = writeln!(o, "{k}.alpha = {}", t.alpha);
            if let Some(r) = t.rho_ga {
                let _ = writeln!(o, "{k}.rho_ga = {r} g/cm3");
            }
        }

        let _ = writeln!(o, "\n[cosmic]");
        let enabled: Vec<&str> = self.cosmic.enabled().map(|m| m.species.name()).collect();
        let _ = writeln!(o, "species = {}", enabled.join(", "));
        for m in &self.cosmic.species {
            let n = m.species.name();
            let _ = writeln!(o, "{n}.flux = {} /cm2/s", m.integral_flux);
            let _ = writeln!(o, "{n}.scale_height = {} m", m.scale_height_m);
            let _ = writeln!(o, "{n}.e_min = {} MeV", m.e_min_mev);
            let _ = writeln!(o, "{n}.e_max = {} MeV", m.e_max_mev);
            let _ = writeln!(o, "{n}.zenith_exponent = {}", m.zenith_exponent);
        }

        let m = &self.mc;
        let _ = writeln!(o, "\n[mc]");
        let _ = writeln!(o, "histories = {}", m.histories);
        let _ = writeln!(o, "copies = {}", m.copies);
        let _ = writeln!(o, "batch_size = {}", m.batch_size);
        let _ = writeln!(o, "seed = {}", m.seed);
        let _ = writeln!(o, "floor = {} cm", m.floor_cm);
        let _ = writeln!(o, "generation_side = {} cm", m.generation_side_cm);
        let strag = match m.straggling {
            Straggling::Landau => "landau",
            Straggling::None => "none",
        };
        let _ = writeln!(o, "straggling = {strag}");
        let _ = writeln!(o, "photon_cutoff = {} keV", m.photon_cutoff_kev);
        let _ = writeln!(o, "charged_cutoff = {} keV", m.charged_cutoff_kev);
        let _ = writeln!(o, "substrate_photon_cutoff = {} keV", m.substrate_photon_cutoff_kev);
        let _ = writeln!(o, "substrate_charged_cutoff = {} keV", m.substrate_charged_cutoff_kev);
        let _ = writeln!(o, "neutron_removal = {} cm2/g", m.neutron_removal_cm2_per_g);
        let _ = writeln!(o, "bins = {}", m.bins);
        let _ = writeln!(o, "bin_min = {} keV", m.bin_min_kev);
        let _ = writeln!(o, "bin_max = {} keV", m.bin_max_kev);

        let out = &self.output;
        let _ = writeln!(o, "\n[output]");
        let _ = writeln!(o, "directory = {}", out.directory.display());
        let _ = writeln!(o, "prefix = {}", out.prefix);
        let _ = writeln!(o, "phase_space = {}", out.phase_space);
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_nominal() {
        let c = Config::parse("").unwrap();
        assert_eq!(c, Config::default());
    }

    #[test]
    fn dump_round_trips() {
        let text = "[substrate]\nmaterial = GaAs\nthickness = 0.3 mm\nwidth = 7.5 mm\n\
                    [environment]\nelevation = 1.6 km\nactivity.U238b = 12.5 Bq/kg\n\
                    [sources]\nscale_height_mode = split\nCR.c = 0.041 /s\n\
                    [cosmic]\nspecies = mu-, mu+\nmu-.scale_height = 4.8 km\n\
                    [mc]\nhistories = 1e6\nstraggling = none\n";
        let c = Config::parse(text).unwrap();
        assert_eq!(c.substrate.thickness_um, 300.0);
        assert_eq!(c.environment.elevation_m, 1600.0);
        let again = Config::parse(&c.dump()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.dump(), c.dump());
    }

    #[test]
    fn errors_name_the_key() {
        let e = Config::parse("[substrate]\nthickness = 500\n").unwrap_err();
        assert_eq!(e.key, "substrate.thickness");
        assert_eq!(e.line, Some(2));
        let e = Config::parse("[substrate]\nthicknes = 500 um\n").unwrap_err();
        assert!(e.message.contains("unknown key"));
        let e = Config::parse("[substrate]\nmaterial = Unobtainium\n").unwrap_err();
        assert!(e.message.contains("known materials") && e.message.contains("Si"));
        let e = Config::parse("[geometry]\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
        let e = Config::parse("thickness = 500 um\n").unwrap_err();
        assert!(e.message.contains("before any"));
        let e = Config::parse("[mc]\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(e.message.contains("twice"));
        let e = Config::parse("[substrate]\nthickness = -5 um\n").unwrap_err();
        assert_eq!(e.key, "substrate");
        let e = Config::parse("[sources]\nCR.rho_ga = 2 g/cm3\n").unwrap_err();
        assert!(e.message.contains("unknown key"));
    }
}
