use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{Binning, Histogram};

/// Highest gamma energy allowed in a chain (keV).
pub const CHAIN_MAX_ENERGY_KEV: f64 = 3000.0;

/// The five gamma-producing half-chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChainId {
    K40,
    Th232a,
    Th232b,
    U238a,
    U238b,
}

impl ChainId {
    pub const ALL: [ChainId; 5] = [ChainId::K40, ChainId::Th232a, ChainId::Th232b, ChainId::U238a, ChainId::U238b];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ChainId::K40 => "K40",
            ChainId::Th232a => "Th232a",
            ChainId::Th232b => "Th232b",
            ChainId::U238a => "U238a",
            ChainId::U238b => "U238b",
        }
    }

    /// Nominal specific activity n_s (Bq/kg) of typical concrete.
    pub fn nominal_activity(self) -> f64 {
        match self {
            ChainId::K40 => 400.0,
            ChainId::Th232a | ChainId::Th232b => 30.0,
            ChainId::U238a | ChainId::U238b => 40.0,
        }
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChainId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown decay chain `{s}`")))
    }
}

/// Specific activity (Bq/kg) per half-chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainActivities(pub [f64; 5]);

impl ChainActivities {
    pub fn nominal() -> Self {
        ChainActivities(ChainId::ALL.map(ChainId::nominal_activity))
    }

    pub fn zero() -> Self {
        ChainActivities([0.0; 5])
    }

    pub fn only(chain: ChainId, activity: f64) -> Self {
        let mut a = Self::zero();
        a[chain] = activity;
        a
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Relative activity ã_s = a_s / n_s.
    pub fn relative(&self, chain: ChainId) -> f64 {
        self[chain] / chain.nominal_activity()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ChainId, f64)> + '_ {
        ChainId::ALL.into_iter().map(move |c| (c, self[c]))
    }
}

impl Default for ChainActivities {
    fn default() -> Self {
        Self::nominal()
    }
}

impl Index<ChainId> for ChainActivities {
    type Output = f64;
    fn index(&self, c: ChainId) -> &f64 {
        &self.0[c.index()]
    }
}

impl IndexMut<ChainId> for ChainActivities {
    fn index_mut(&mut self, c: ChainId) -> &mut f64 {
        &mut self.0[c.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaLine {
    pub isotope: String,
    pub energy_kev: f64,
    /// Photons per parent decay.
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayChain {
    pub id: ChainId,
    pub lines: Vec<GammaLine>,
    /// n_s (Bq/kg)
    pub nominal_activity: f64,
}

impl DecayChain {
    pub fn new(id: ChainId, lines: Vec<GammaLine>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::invalid(format!("chain {id} has no lines")));
        }
        for l in &lines {
            if !(l.intensity > 0.0 && l.intensity <= 1.0) {
                return Err(Error::invalid(format!(
                    "{id} line {} keV: intensity {} not in (0, 1]",
                    l.energy_kev, l.intensity
                )));
            }
            if !(l.energy_kev > 0.0 && l.energy_kev <= CHAIN_MAX_ENERGY_KEV) {
                return Err(Error::invalid(format!(
                    "{id} line energy {} keV not in (0, {CHAIN_MAX_ENERGY_KEV}]",
                    l.energy_kev
                )));
            }
        }
        Ok(DecayChain { id, lines, nominal_activity: id.nominal_activity() })
    }

    /// Gamma energies (keV) emitted in one parent decay. Each line fires
    /// independently with its per-decay probability.
    pub fn sample_emission<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::new();
        self.sample_emission_into(rng, &mut out);
        out
    }

    pub fn sample_emission_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        for line in &self.lines {
            if rng.random::<f64>() < line.intensity {
                out.push(line.energy_kev);
            }
        }
    }

    /// Mean number of photons per decay.
    pub fn photons_per_decay(&self) -> f64 {
        self.lines.iter().map(|l| l.intensity).sum()
    }
}

/// Gamma emission of one parent decay of `chain`.
pub fn sample_decay_emission<R: Rng + ?Sized>(chain: &DecayChain, rng: &mut R) -> Vec<f64> {
    chain.sample_emission(rng)
}

/// Line library for all five half-chains.
#[derive(Debug, Clone, PartialEq)]
pub struct LineLibrary {
    chains: Vec<DecayChain>,
}

impl LineLibrary {
    pub fn builtin() -> &'static LineLibrary {
        static LIB: OnceLock<LineLibrary> = OnceLock::new();
        LIB.get_or_init(|| {
            Self::parse(include_str!("../../data/gamma_lines.csv")).expect("embedded line library is valid")
        })
    }

    /// Parses `chain,isotope,energy_keV,intensity` rows.
    pub fn parse(text: &str) -> Result<Self> {
        let mut per_chain: Vec<Vec<GammaLine>> = vec![Vec::new(); 5];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("chain,") {
                continue;
            }
            let perr = |m: String| Error::Parse { line: i + 1, message: m };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(perr(format!("expected 4 fields, got {}", f.len())));
            }
            let chain: ChainId = f[0].parse().map_err(|e: Error| perr(e.to_string()))?;
            let energy_kev = f[2].parse().map_err(|e| perr(format!("energy: {e}")))?;
            let intensity = f[3].parse().map_err(|e| perr(format!("intensity: {e}")))?;
            per_chain[chain.index()].push(GammaLine { isotope: f[1].to_string(), energy_kev, intensity });
        }
        let chains = ChainId::ALL
            .into_iter()
            .zip(per_chain)
            .map(|(id, lines)| DecayChain::new(id, lines))
            .collect::<Result<_>>()?;
        Ok(LineLibrary { chains })
    }

    pub fn chain(&self, id: ChainId) -> &DecayChain {
        &self.chains[id.index()]
    }

    pub fn chains(&self) -> &[DecayChain] {
        &self.chains
    }

    pub fn max_energy_kev(&self) -> f64 {
        self.chains.iter().flat_map(|c| c.lines.iter().map(|l| l.energy_kev)).fold(0.0, f64::max)
    }
}

/// Line spectrum of gamma emission rate density (photons·kg⁻¹·s⁻¹ per bin)
/// for the given specific activities.
pub fn emitted_spectrum(library: &LineLibrary, activities: &ChainActivities, binning: &Binning) -> Histogram {
    let mut h = Histogram::new(binning.clone());
    for chain in library.chains() {
        let a = activities[chain.id];
        if a == 0.0 {
            continue;
        }
        for line in &chain.lines {
            h.fill(line.energy_kev, a * line.intensity);
        }
    }
    h
}
