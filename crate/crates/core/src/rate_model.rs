//! Closed-form background rates.
//!
//! For each source s (five decay half-chains and cosmic rays):
//!
//! ```text
//! R = (A / 100 mm²) Σ ã_s (c_s + g_s τ)   κ_c κ_sh κ_ρ
//! P = (A / 100 mm²) Σ ã_s  p_s τ^β_s      κ_c κ_sh κ_ρ
//! M = (A / 100 mm²) Σ ã_s  m_s τ^α_s      κ_c κ_sh κ_ρ
//! ```
//!
//! with ã = a/n for the chains and ã = exp(H/λ) for cosmic rays. The
//! correction factors account for overhead concrete (κ_c), wafer outline
//! (κ_sh) and substrate density (κ_ρ).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::deposition::{SubstrateSpec, NOMINAL_AREA_MM2};
use crate::error::{Error, Result};
use crate::sources::{ChainId, CosmicModel, EnvironmentSpec, NOMINAL_CEILING_CM};
use crate::species::Species;

/// One of the six summed sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceId {
    Chain(ChainId),
    Cosmic,
}

impl SourceId {
    pub const ALL: [SourceId; 6] = [
        SourceId::Chain(ChainId::K40),
        SourceId::Chain(ChainId::Th232a),
        SourceId::Chain(ChainId::Th232b),
        SourceId::Chain(ChainId::U238a),
        SourceId::Chain(ChainId::U238b),
        SourceId::Cosmic,
    ];
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceId::Chain(c) => write!(f, "{c}"),
            SourceId::Cosmic => f.write_str("CR"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    /// Events with any deposit.
    R,
    /// Deposited power.
    P,
    /// Events above 1 MeV.
    M,
}

/// Coefficients of one source at nominal conditions (10 × 10 mm², 500 µm
/// silicon, sea level, 20 cm ceiling, 1 cm aluminium).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceTerm {
    /// Thickness-independent event rate (s⁻¹).
    pub c: f64,
    /// Event rate per unit τ (s⁻¹).
    pub g: f64,
    /// Power (keV/s).
    pub p: f64,
    pub beta: f64,
    /// Rate above 1 MeV (s⁻¹).
    pub m: f64,
    pub alpha: f64,
    /// Added to the density of gallium-bearing substrates (g/cm³);
    /// gamma chains only.
    pub rho_ga: Option<f64>,
}

/// Full parameter set with the correction-rule constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Indexed by [`ChainId::index`].
    pub chains: [SourceTerm; 5],
    pub cosmic: SourceTerm,
    /// Replacement g for cosmic rays on gallium-bearing substrates (s⁻¹).
    pub cosmic_g_gallium: f64,
    /// Fractional loss of cosmic-ray rates per 10 cm of extra concrete.
    pub ceiling_loss_per_10cm: f64,
    /// Shape ratio of the reference outline, where κ_sh = 1.
    pub shape_ratio_ref: f64,
    /// Second shape anchor and its κ_sh for R and P.
    pub shape_ratio_alt: f64,
    pub shape_kappa_r_alt: f64,
    pub shape_kappa_p_alt: f64,
    /// M ∝ ρ̃ to this power.
    pub m_density_exponent: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        let chain = |c: f64, g: f64, p: f64, m: f64, rho_ga: f64| SourceTerm {
            c,
            g,
            p,
            beta: 1.12,
            m,
            alpha: 5.0,
            rho_ga: Some(rho_ga),
        };
        SourceParams {
            chains: [
                chain(2.2e-3, 6.8e-3, 1.4, 15e-6, 2.0),
                chain(0.6e-3, 4.9e-3, 0.5, 2e-6, 4.0),
                chain(1.5e-3, 6.6e-3, 0.9, 20e-6, 4.0),
                chain(0.02e-3, 0.6e-3, 0.03, 0.0, 15.0),
                chain(1.9e-3, 11.7e-3, 1.4, 13e-6, 4.0),
            ],
            cosmic: SourceTerm { c: 40.0e-3, g: 1.4e-3, p: 8.0, beta: 1.0, m: 180.0e-6, alpha: 1.8, rho_ga: None },
            cosmic_g_gallium: 7.0e-3,
            ceiling_loss_per_10cm: 0.02,
            shape_ratio_ref: 0.2,
            shape_ratio_alt: 1.1,
            shape_kappa_r_alt: 1.20,
            shape_kappa_p_alt: 0.97,
            m_density_exponent: 2.7,
        }
    }
}

impl SourceParams {
    pub fn term(&self, source: SourceId) -> &SourceTerm {
        match source {
            SourceId::Chain(c) => &self.chains[c.index()],
            SourceId::Cosmic => &self.cosmic,
        }
    }

    pub fn term_mut(&mut self, source: SourceId) -> &mut SourceTerm {
        match source {
            SourceId::Chain(c) => &mut self.chains[c.index()],
            SourceId::Cosmic => &mut self.cosmic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in SourceId::ALL {
            let t = self.term(s);
            if [t.c, t.g, t.p, t.m].iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::invalid(format!("{s}: rate coefficients must be >= 0")));
            }
            if !t.beta.is_finite() || !t.alpha.is_finite() {
                return Err(Error::invalid(format!("{s}: exponents must be finite")));
            }
            if t.rho_ga.is_some_and(|r| !(r >= 0.0)) {
                return Err(Error::invalid(format!("{s}: gallium density offset must be >= 0")));
            }
        }
        if !(self.shape_ratio_alt != self.shape_ratio_ref) {
            return Err(Error::invalid("shape anchors must differ"));
        }
        if !(0.0..1.0).contains(&self.ceiling_loss_per_10cm) {
            return Err(Error::invalid("ceiling loss must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// How the cosmic-ray multiplier depends on elevation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScaleHeight {
    /// ã = exp(H/λ).
    Single { lambda_m: f64 },
    /// ã = Σ share_i exp(H/λ_i) over muon, nuclear and electromagnetic
    /// components; shares sum to 1.
    Split { muon_m: f64, nuclear_m: f64, em_m: f64, muon_share: f64, nuclear_share: f64, em_share: f64 },
}

impl Default for ScaleHeight {
    fn default() -> Self {
        ScaleHeight::Single { lambda_m: 2000.0 }
    }
}

impl ScaleHeight {
    /// Species-split form with the default scale heights, weighted by the
    /// sea-level fluxes of the built-in cosmic model.
    pub fn split_default() -> Self {
        let model = CosmicModel::sea_level();
        let total = model.total_flux(0.0);
        let share = |f: fn(Species) -> bool| {
            model.species.iter().filter(|s| f(s.species)).map(|s| s.integral_flux).sum::<f64>() / total
        };
        let muon_share = share(Species::is_muon);
        let nuclear_share = share(Species::is_nuclear);
        ScaleHeight::Split {
            muon_m: 5000.0,
            nuclear_m: 1000.0,
            em_m: 2500.0,
            muon_share,
            nuclear_share,
            em_share: 1.0 - muon_share - nuclear_share,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScaleHeight::Single { lambda_m } if lambda_m > 0.0 && lambda_m.is_finite() => Ok(()),
            ScaleHeight::Single { lambda_m } => Err(Error::invalid(format!("scale height {lambda_m} m must be > 0"))),
            ScaleHeight::Split { muon_m, nuclear_m, em_m, muon_share, nuclear_share, em_share } => {
                if [muon_m, nuclear_m, em_m].iter().any(|l| !(*l > 0.0)) {
                    return Err(Error::invalid("scale heights must be > 0"));
                }
                if [muon_share, nuclear_share, em_share].iter().any(|s| !(*s >= 0.0)) {
                    return Err(Error::invalid("species shares must be >= 0"));
                }
                if ((muon_share + nuclear_share + em_share) - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid("species shares must sum to 1"));
                }
                Ok(())
            }
        }
    }

    pub fn multiplier(&self, elevation_m: f64) -> f64 {
        match *self {
            ScaleHeight::Single { lambda_m } => (elevation_m / lambda_m).exp(),
            ScaleHeight::Split { muon_m, nuclear_m, em_m, muon_share, nuclear_share, em_share } => {
                muon_share * (elevation_m / muon_m).exp()
                    + nuclear_share * (elevation_m / nuclear_m).exp()
                    + em_share * (elevation_m / em_m).exp()
            }
        }
    }
}

/// R (s⁻¹), P (keV/s), M (s⁻¹).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub r: f64,
    pub p: f64,
    pub m: f64,
}

impl RateTriple {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::R => self.r,
            Quantity::P => self.p,
            Quantity::M => self.m,
        }
    }

    /// Mean time between events above 1 MeV (s).
    pub fn m_interval_s(&self) -> f64 {
        1.0 / self.m
    }
}

impl std::ops::Add for RateTriple {
    type Output = RateTriple;
    fn add(self, o: RateTriple) -> RateTriple {
        RateTriple { r: self.r + o.r, p: self.p + o.p, m: self.m + o.m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corrections {
    pub kappa_c: f64,
    pub kappa_sh: f64,
    pub kappa_rho: f64,
}

impl Corrections {
    pub fn product(&self) -> f64 {
        self.kappa_c * self.kappa_sh * self.kappa_rho
    }
}

fn shape_factor(ratio: f64, params: &SourceParams, q: Quantity) -> f64 {
    let alt = match q {
        Quantity::R => params.shape_kappa_r_alt,
        Quantity::P => params.shape_kappa_p_alt,
        Quantity::M => return 1.0,
    };
    let slope = (alt - 1.0) / (params.shape_ratio_alt - params.shape_ratio_ref);
    (1.0 + slope * (ratio - params.shape_ratio_ref)).max(0.0)
}

/// κ_c, κ_sh and κ_ρ for one source and quantity.
pub fn correction_factors(
    substrate: &SubstrateSpec,
    env: &EnvironmentSpec,
    params: &SourceParams,
    source: SourceId,
    quantity: Quantity,
) -> Corrections {
    let kappa_c = match source {
        SourceId::Cosmic => (1.0 - params.ceiling_loss_per_10cm).powf((env.ceiling_cm - NOMINAL_CEILING_CM) / 10.0),
        SourceId::Chain(_) => 1.0,
    };
    let kappa_sh = shape_factor(substrate.shape_ratio(), params, quantity);
    let rel = substrate.relative_density();
    let gallium = substrate.material.contains_gallium;
    let kappa_rho = match (quantity, source) {
        (Quantity::M, _) => rel.powf(params.m_density_exponent),
        (Quantity::R, SourceId::Cosmic) => 1.0,
        (Quantity::P, SourceId::Cosmic) => rel,
        (_, SourceId::Chain(c)) => match params.chains[c.index()].rho_ga {
            Some(extra) if gallium => (substrate.material.density + extra) / crate::materials::SILICON_DENSITY,
            _ => rel,
        },
    };
    Corrections { kappa_c, kappa_sh, kappa_rho }
}

/// Contribution of one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRates {
    pub source: SourceId,
    /// ã for this source.
    pub relative_strength: f64,
    pub corrections_r: Corrections,
    pub corrections_p: Corrections,
    pub corrections_m: Corrections,
    pub rates: RateTriple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub total: RateTriple,
    pub sources: Vec<SourceRates>,
}

impl RateReport {
    /// Sum over the five decay half-chains.
    pub fn gamma_total(&self) -> RateTriple {
        self.sources
            .iter()
            .filter(|s| matches!(s.source, SourceId::Chain(_)))
            .fold(RateTriple::default(), |a, s| a + s.rates)
    }

    pub fn source(&self, id: SourceId) -> Option<&SourceRates> {
        self.sources.iter().find(|s| s.source == id)
    }
}

/// Evaluate the closed-form rates.
///
/// A source's M is capped at its R: the power law in τ eventually
/// outgrows the linear event rate, which would imply more events above
/// 1 MeV than events.
pub fn compute_rates(
    substrate: &SubstrateSpec,
    env: &EnvironmentSpec,
    params: &SourceParams,
    scale: &ScaleHeight,
) -> Result<RateReport> {
    if !(substrate.thickness_um > 0.0) || !substrate.thickness_um.is_finite() {
        return Err(Error::invalid(format!("thickness {} µm must be > 0", substrate.thickness_um)));
    }
    if !(substrate.width_mm >= 0.0) || !(substrate.length_mm >= 0.0) {
        return Err(Error::invalid("substrate dimensions must be >= 0"));
    }
    env.validate()?;
    params.validate()?;
    scale.validate()?;
    let area = substrate.area_mm2() / NOMINAL_AREA_MM2;
    let tau = substrate.tau();
    let mut sources = Vec::with_capacity(6);
    let mut total = RateTriple::default();
    for id in SourceId::ALL {
        let t = params.term(id);
        let strength = match id {
            SourceId::Chain(c) => env.relative_activity(c),
            SourceId::Cosmic => scale.multiplier(env.elevation_m),
        };
        let kr = correction_factors(substrate, env, params, id, Quantity::R);
        let kp = correction_factors(substrate, env, params, id, Quantity::P);
        let km = correction_factors(substrate, env, params, id, Quantity::M);
        let g =
            if id == SourceId::Cosmic && substrate.material.contains_gallium { params.cosmic_g_gallium } else { t.g };
        let rates = if area == 0.0 {
            RateTriple::default()
        } else {
            let scale = area * strength;
            let r = scale * (t.c + g * tau) * kr.product();
            let p = scale * t.p * tau.powf(t.beta) * kp.product();
            let m = (scale * t.m * tau.powf(t.alpha) * km.product()).min(r);
            RateTriple { r, p, m }
        };
        total = total + rates;
        sources.push(SourceRates {
            source: id,
            relative_strength: strength,
            corrections_r: kr,
            corrections_p: kp,
            corrections_m: km,
            rates,
        });
    }
    Ok(RateReport { total, sources })
}
