//! Two-stage Monte Carlo runs.
//!
//! Stage 1 carries gamma rays out of a concrete floor, or cosmic rays down
//! through a ceiling, and records what emerges. Stage 2 re-aims each
//! emerging history at a sphere around the substrate (optionally several
//! times) and tallies the energy it deposits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{summarize_spectrum, SpectrumRates, M_THRESHOLD_KEV};
use crate::deposition::{deposit_history, merge_spectra, DepositConfig, DepositSpectrum, MergeMode, SubstrateSpec};
use crate::error::{Error, Result};
use crate::parallel::{plan_batches, run_batches, DEFAULT_BATCH_SIZE};
use crate::phase_space::PhaseSpace;
use crate::reaiming::{reaim_history, ReaimTarget};
use crate::sources::{CosmicModel, CosmicSource, EnvironmentSpec, GenerationPlane, LineLibrary};
use crate::transport::{simulate_cosmic_shielding, simulate_slab_emission, SlabGeometry, TransportConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Gamma,
    Cosmic,
}

impl std::str::FromStr for Stage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Stage::Gamma),
            "cosmic" => Ok(Stage::Cosmic),
            _ => Err(Error::invalid(format!("unknown stage `{s}` (expected gamma or cosmic)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Stage-1 decays (gamma) or primaries (cosmic).
    pub histories: u64,
    /// Times each stage-1 history is re-aimed and deposited.
    pub copies: u32,
    pub batch_size: u64,
    pub seed: u64,
    /// Worker threads; all cores when `None`.
    pub threads: Option<usize>,
    /// Thickness of the emitting floor (cm).
    pub floor_concrete_cm: f64,
    /// Side of the square generation region (cm).
    pub generation_side_cm: f64,
    /// Keep the stage-1 phase space in the result.
    pub keep_phase_space: bool,
    pub transport: TransportConfig,
    pub deposit: DepositConfig,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            histories: 100_000,
            copies: 1,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: 1,
            threads: None,
            floor_concrete_cm: 50.0,
            generation_side_cm: 100.0,
            keep_phase_space: false,
            transport: TransportConfig::default(),
            deposit: DepositConfig::default(),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.histories == 0 {
            return Err(Error::invalid("number of histories must be > 0"));
        }
        if self.copies == 0 {
            return Err(Error::invalid("number of copies must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be > 0"));
        }
        if !(self.floor_concrete_cm > 0.0) {
            return Err(Error::invalid("floor thickness must be > 0"));
        }
        if !(self.generation_side_cm > 0.0) {
            return Err(Error::invalid("generation side must be > 0"));
        }
        self.transport.validate()?;
        self.deposit.validate()
    }
}

#[derive(Debug, Clone)]
pub struct StageResult {
    pub stage: Stage,
    /// Stage-1 output before re-aiming, if requested.
    pub phase_space: Option<PhaseSpace>,
    /// Number of stage-1 histories that reached the substrate side.
    pub emerging_histories: u64,
    pub stage1_time_s: f64,
    pub spectrum: DepositSpectrum,
    pub summary: SpectrumRates,
}

/// Re-aim every history of an un-aimed phase space `copies` times and
/// deposit it. Copies of one history are tallied as one variance sample.
/// The spectrum's live time is `live_time_s`.
pub fn deposit_recycled<R: Rng + ?Sized>(
    ps: &PhaseSpace,
    substrate: &SubstrateSpec,
    target: &ReaimTarget,
    copies: u32,
    cfg: &DepositConfig,
    live_time_s: f64,
    rng: &mut R,
) -> Result<DepositSpectrum> {
    if ps.aim.is_some() {
        return Err(Error::invalid("phase space has already been re-aimed"));
    }
    if !target.encloses(&substrate.bounding_box()) {
        return Err(Error::invalid("re-aim sphere does not enclose the substrate"));
    }
    let mut spec = DepositSpectrum::new(cfg.binning.clone(), live_time_s)?;
    let mut group = Vec::new();
    let mut events = Vec::with_capacity(copies as usize);
    for hist in ps.histories() {
        events.clear();
        for _ in 0..copies {
            group.clear();
            group.extend_from_slice(hist);
            reaim_history(&mut group, target, rng);
            let e = deposit_history(&group, substrate, cfg, rng)?;
            let w = group.iter().map(|r| r.weight).fold(0.0, f64::max);
            events.push((e, w));
        }
        spec.fill_group(&events);
    }
    Ok(spec)
}

struct BatchOut {
    phase_space: Option<PhaseSpace>,
    emerging: u64,
    stage1_time_s: f64,
    spectrum: DepositSpectrum,
}

fn finish(stage: Stage, parts: Vec<BatchOut>) -> Result<StageResult> {
    let emerging = parts.iter().map(|p| p.emerging).sum();
    let stage1_time_s = parts.iter().map(|p| p.stage1_time_s).sum();
    let spectra: Vec<DepositSpectrum> = parts.iter().map(|p| p.spectrum.clone()).collect();
    let spectrum = merge_spectra(&spectra, MergeMode::Partitions)?;
    let phase_space = if parts.iter().all(|p| p.phase_space.is_some()) {
        Some(PhaseSpace::merge(parts.into_iter().filter_map(|p| p.phase_space))?)
    } else {
        None
    };
    let summary = summarize_spectrum(&spectrum, M_THRESHOLD_KEV)?;
    Ok(StageResult { stage, phase_space, emerging_histories: emerging, stage1_time_s, spectrum, summary })
}

fn stage_two<R: Rng + ?Sized>(
    ps: PhaseSpace,
    substrate: &SubstrateSpec,
    cfg: &McConfig,
    rng: &mut R,
) -> Result<BatchOut> {
    let target = ReaimTarget::around(&substrate.bounding_box(), ps.generation_area_cm2)?;
    let live = ps.effective_time_s * target.area_ratio()? * cfg.copies as f64;
    let spectrum = deposit_recycled(&ps, substrate, &target, cfg.copies, &cfg.deposit, live, rng)?;
    Ok(BatchOut {
        emerging: ps.histories().count() as u64,
        stage1_time_s: ps.effective_time_s,
        phase_space: cfg.keep_phase_space.then_some(ps),
        spectrum,
    })
}

/// Gamma rays from the floor: decays uniformly inside `floor_concrete_cm` of
/// concrete under the environment's aluminium shell.
pub fn run_gamma(substrate: &SubstrateSpec, env: &EnvironmentSpec, cfg: &McConfig) -> Result<StageResult> {
    substrate.validate()?;
    env.validate()?;
    cfg.validate()?;
    let geom = SlabGeometry::gamma_emitter(cfg.floor_concrete_cm, env.aluminum_cm)?;
    let library = LineLibrary::builtin();
    let batches = plan_batches(cfg.histories, cfg.batch_size)?;
    let parts = run_batches(&batches, cfg.seed, cfg.threads, |b, rng| {
        let run = simulate_slab_emission(
            library,
            &env.activities,
            &geom,
            1,
            cfg.generation_side_cm,
            b.count,
            b.first,
            rng,
            &cfg.transport,
        )?;
        stage_two(run.phase_space, substrate, cfg, rng)
    })?;
    finish(Stage::Gamma, parts)
}

/// Cosmic rays through the environment's ceiling and aluminium shell.
pub fn run_cosmic(
    substrate: &SubstrateSpec,
    env: &EnvironmentSpec,
    model: &CosmicModel,
    cfg: &McConfig,
) -> Result<StageResult> {
    substrate.validate()?;
    env.validate()?;
    cfg.validate()?;
    let geom = SlabGeometry::ceiling(env.ceiling_cm, env.aluminum_cm)?;
    let plane = GenerationPlane { z_cm: geom.z_top(), side_cm: cfg.generation_side_cm };
    let source = CosmicSource::new(model, env.elevation_m, plane)?;
    let batches = plan_batches(cfg.histories, cfg.batch_size)?;
    let parts = run_batches(&batches, cfg.seed, cfg.threads, |b, rng| {
        let run = simulate_cosmic_shielding(&source, &geom, b.count, b.first, rng, &cfg.transport)?;
        stage_two(run.phase_space, substrate, cfg, rng)
    })?;
    finish(Stage::Cosmic, parts)
}

/// Stage 2 alone, from a saved stage-1 phase space.
pub fn run_deposition(ps: &PhaseSpace, substrate: &SubstrateSpec, cfg: &McConfig) -> Result<DepositSpectrum> {
    substrate.validate()?;
    cfg.validate()?;
    let target = ReaimTarget::around(&substrate.bounding_box(), ps.generation_area_cm2)?;
    let live = ps.effective_time_s * target.area_ratio()? * cfg.copies as f64;
    // split by history; every chunk reports against the full live time, so
    // chunk spectra add as independent sources
    let groups: Vec<_> = ps.histories().collect();
    let batches = plan_batches(groups.len() as u64, cfg.batch_size)?;
    if batches.is_empty() {
        return DepositSpectrum::new(cfg.deposit.binning.clone(), live);
    }
    let parts = run_batches(&batches, cfg.seed, cfg.threads, |b, rng| {
        let mut chunk = PhaseSpace::new(ps.effective_time_s, ps.generation_area_cm2);
        for g in &groups[b.first as usize..(b.first + b.count) as usize] {
            chunk.records.extend_from_slice(g);
        }
        deposit_recycled(&chunk, substrate, &target, cfg.copies, &cfg.deposit, live, rng)
    })?;
    merge_spectra(&parts, MergeMode::Sources)
}
