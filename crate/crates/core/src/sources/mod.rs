//! Primary particle generators: gamma lines of the natural decay chains and
//! a parameterised ground-level cosmic-ray flux.

mod chains;
mod cosmic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chains::{
    emitted_spectrum, sample_decay_emission, ChainActivities, ChainId, DecayChain, GammaLine, LineLibrary,
    CHAIN_MAX_ENERGY_KEV,
};
pub use cosmic::{
    sample_cosmic_primary, CosmicModel, CosmicSource, CosmicSpeciesModel, EnergySampler, GenerationPlane, SpectrumShape,
};

/// Surroundings of the device: site elevation, overhead shielding and the
/// radioactivity of the nearby concrete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    /// Metres above sea level.
    pub elevation_m: f64,
    /// Overhead concrete (cm).
    pub ceiling_cm: f64,
    /// Aluminium shell around the cryostat (cm).
    pub aluminum_cm: f64,
    /// Specific activities of the concrete (Bq/kg).
    pub activities: ChainActivities,
}

/// Ceiling thickness at which the tabulated cosmic-ray parameters apply.
pub const NOMINAL_CEILING_CM: f64 = 20.0;

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec {
            elevation_m: 0.0,
            ceiling_cm: NOMINAL_CEILING_CM,
            aluminum_cm: 1.0,
            activities: ChainActivities::nominal(),
        }
    }
}

impl EnvironmentSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.elevation_m >= 0.0) || !self.elevation_m.is_finite() {
            return Err(Error::invalid(format!("elevation {} m must be >= 0", self.elevation_m)));
        }
        if !(self.ceiling_cm >= 0.0) || !(self.aluminum_cm >= 0.0) {
            return Err(Error::invalid("shielding thicknesses must be >= 0"));
        }
        for (id, a) in self.activities.iter() {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::invalid(format!("activity of {id} must be >= 0, got {a}")));
            }
        }
        Ok(())
    }

    /// Activity relative to the nominal value, ã = a / n.
    pub fn relative_activity(&self, chain: ChainId) -> f64 {
        self.activities[chain] / chain.nominal_activity()
    }
}
