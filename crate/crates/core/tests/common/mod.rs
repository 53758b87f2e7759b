//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radbkg::analysis::{summarize_spectrum, M_THRESHOLD_KEV};
use radbkg::deposition::{DepositConfig, Straggling, SubstrateSpec};
use radbkg::geometry::Vec3;
use radbkg::phase_space::{PhaseSpace, PhaseSpaceRecord};
use radbkg::pipeline::deposit_recycled;
use radbkg::reaiming::ReaimTarget;
use radbkg::species::Species;

/// Crossing flux used by the beam checks (cm⁻² s⁻¹).
pub const BEAM_FLUX: f64 = 0.02;
pub const BEAM_AREA_CM2: f64 = 1.0e4;

/// Downward 4 GeV muons crossing a horizontal plane: vertical if
/// `isotropic` is false, otherwise with an isotropic radiance (crossing
/// density ∝ cos θ).
pub fn muon_beam(n: u64, isotropic: bool, seed: u64) -> PhaseSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ps = PhaseSpace::new(n as f64 / (BEAM_FLUX * BEAM_AREA_CM2), BEAM_AREA_CM2);
    let side = BEAM_AREA_CM2.sqrt();
    for h in 0..n {
        let dir = if isotropic {
            let c = rng.random::<f64>().sqrt();
            let s = (1.0 - c * c).sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            Vec3::new(s * phi.cos(), s * phi.sin(), -c)
        } else {
            -Vec3::Z
        };
        let pos = Vec3::new((rng.random::<f64>() - 0.5) * side, (rng.random::<f64>() - 0.5) * side, -400.0);
        let mut r = PhaseSpaceRecord::new(Species::MuonMinus, 4.0e6, pos, dir);
        r.history = h;
        ps.records.push(r);
    }
    ps
}

pub struct BeamCheck {
    pub measured: f64,
    pub sigma: f64,
    pub expected: f64,
    pub time_ratio: f64,
    pub expected_time_ratio: f64,
}

impl BeamCheck {
    pub fn pulls(&self) -> f64 {
        (self.measured - self.expected) / self.sigma
    }
}

/// Re-aim a muon beam at the nominal substrate and compare the rate of
/// events that deposit energy with geometry: f·A_top for a vertical beam and
/// Φ(A_top + S_side/2) for an isotropic one.
pub fn beam_check(n: u64, isotropic: bool, seed: u64) -> BeamCheck {
    let s = SubstrateSpec::nominal();
    let bx = s.bounding_box();
    let ps = muon_beam(n, isotropic, seed);
    let target = ReaimTarget::around(&bx, ps.generation_area_cm2).unwrap();
    let ratio = target.area_ratio().unwrap();
    let live = ps.effective_time_s * ratio;
    let cfg = DepositConfig { straggling: Straggling::None, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    let spec = deposit_recycled(&ps, &s, &target, 1, &cfg, live, &mut rng).unwrap();
    let sum = summarize_spectrum(&spec, M_THRESHOLD_KEV).unwrap();
    let h = bx.half;
    let top = 4.0 * h.x * h.y;
    let side = 2.0 * (2.0 * h.x + 2.0 * h.y) * 2.0 * h.z;
    let expected = if isotropic { BEAM_FLUX * (top + side / 2.0) } else { BEAM_FLUX * top };
    BeamCheck {
        measured: sum.rates.r,
        sigma: sum.sigma.unwrap().r,
        expected,
        time_ratio: spec.live_time_s() / ps.effective_time_s,
        expected_time_ratio: BEAM_AREA_CM2 / (std::f64::consts::PI * target.radius_cm * target.radius_cm),
    }
}
