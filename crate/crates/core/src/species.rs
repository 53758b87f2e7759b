use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Electron rest energy (keV).
pub const ELECTRON_MASS_KEV: f64 = 510.998_95;
pub const MUON_MASS_KEV: f64 = 105_658.375_5;
pub const PROTON_MASS_KEV: f64 = 938_272.088_16;
pub const NEUTRON_MASS_KEV: f64 = 939_565.420_52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    #[serde(rename = "gamma")]
    Photon,
    #[serde(rename = "e-")]
    Electron,
    #[serde(rename = "e+")]
    Positron,
    #[serde(rename = "mu-")]
    MuonMinus,
    #[serde(rename = "mu+")]
    MuonPlus,
    #[serde(rename = "p")]
    Proton,
    #[serde(rename = "n")]
    Neutron,
}

impl Species {
    pub const ALL: [Species; 7] = [
        Species::Proton,
        Species::Neutron,
        Species::MuonPlus,
        Species::MuonMinus,
        Species::Positron,
        Species::Electron,
        Species::Photon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Species::Photon => "gamma",
            Species::Electron => "e-",
            Species::Positron => "e+",
            Species::MuonMinus => "mu-",
            Species::MuonPlus => "mu+",
            Species::Proton => "p",
            Species::Neutron => "n",
        }
    }

    pub fn mass_kev(self) -> f64 {
        match self {
            Species::Photon => 0.0,
            Species::Electron | Species::Positron => ELECTRON_MASS_KEV,
            Species::MuonMinus | Species::MuonPlus => MUON_MASS_KEV,
            Species::Proton => PROTON_MASS_KEV,
            Species::Neutron => NEUTRON_MASS_KEV,
        }
    }

    pub fn is_charged(self) -> bool {
        !matches!(self, Species::Photon | Species::Neutron)
    }

    pub fn is_muon(self) -> bool {
        matches!(self, Species::MuonMinus | Species::MuonPlus)
    }

    pub fn is_nuclear(self) -> bool {
        matches!(self, Species::Proton | Species::Neutron)
    }

    pub fn is_electromagnetic(self) -> bool {
        matches!(self, Species::Photon | Species::Electron | Species::Positron)
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "gamma" | "photon" => Species::Photon,
            "e-" | "electron" => Species::Electron,
            "e+" | "positron" => Species::Positron,
            "mu-" => Species::MuonMinus,
            "mu+" => Species::MuonPlus,
            "p" | "proton" => Species::Proton,
            "n" | "neutron" => Species::Neutron,
            other => return Err(Error::UnknownSpecies(other.to_string())),
        })
    }
}
