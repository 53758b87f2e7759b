//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs with `cargo test --test acceptance` (no libtest harness).

use std::time::Instant;

use clap::Parser;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radbkg::analysis::{
    fit_exponential, fit_linear, fit_power_law, spectrum_mode, summarize_spectrum, Weighting, M_THRESHOLD_KEV,
};
use radbkg::deposition::{merge_spectra, DepositConfig, DepositSpectrum, MergeMode, Straggling, SubstrateSpec};
use radbkg::geometry::Vec3;
use radbkg::histogram::Binning;
use radbkg::materials::{material, Process};
use radbkg::phase_space::{PhaseSpace, PhaseSpaceRecord};
use radbkg::pipeline::{deposit_recycled, run_gamma, McConfig, Stage};
use radbkg::rate_model::{compute_rates, RateTriple, ScaleHeight, SourceParams};
use radbkg::reaiming::ReaimTarget;
use radbkg::sources::{ChainActivities, EnvironmentSpec};
use radbkg::species::Species;
use radbkg::transport::{klein_nishina_density, sample_klein_nishina, transport, Layer, SlabGeometry, TransportConfig};
use radbkg_cli::commands::{run_stage, sweep, SweepOptions, SweepParam, SweepReport};
use radbkg_cli::{run, Cli, Config};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn estimate_json(args: &[&str]) -> serde_json::Value {
    let cli = Cli::try_parse_from(std::iter::once("radbkg").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    run(&cli, &mut out).unwrap();
    serde_json::from_slice(&out).unwrap()
}

fn triple(v: &serde_json::Value) -> RateTriple {
    RateTriple { r: v["r"].as_f64().unwrap(), p: v["p"].as_f64().unwrap(), m: v["m"].as_f64().unwrap() }
}

fn exact(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * b.abs()
}

fn c1_nominal() -> Outcome {
    let t0 = Instant::now();
    let v = estimate_json(&["--json", "estimate"]);
    let t = triple(&v["total"]);
    let dt = t0.elapsed().as_secs_f64();
    check(
        exact(t.r, 78.22e-3) && exact(t.p, 12.23) && exact(t.m, 230e-6) && dt < 1.0,
        format!("R = {:e} /s, P = {} keV/s, M = {:e} /s in {:.3} s", t.r, t.p, t.m, dt),
    )
}

fn c2_thin_limit() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thin.cfg");
    std::fs::write(&path, "[substrate]\nthickness = 1e-9 um\n").unwrap();
    let v = estimate_json(&["--json", "--config", path.to_str().unwrap(), "estimate"]);
    let r = v["total"]["r"].as_f64().unwrap();
    check((r - 46.22e-3).abs() < 1e-12, format!("R(τ → 0) = {r:e} /s vs 46.22e-3"))
}

fn c3_once_per_hour() -> Outcome {
    let v = estimate_json(&["--json", "estimate"]);
    let minutes = 1.0 / v["total"]["m"].as_f64().unwrap() / 60.0;
    check(
        (minutes - 72.5).abs() < 0.05 && (minutes / 60.0 - 1.0).abs() <= 0.25,
        format!("one >1 MeV event per {minutes:.2} min, {:+.1}% from 60 min", 100.0 * (minutes / 60.0 - 1.0)),
    )
}

fn thickness_sweep() -> SweepReport {
    let mut cfg = Config::default();
    cfg.mc.histories = 1_000_000;
    cfg.mc.copies = 8;
    cfg.output.phase_space = false;
    let values: Vec<String> = ["30um", "100um", "300um", "500um", "1500um"].iter().map(|s| s.to_string()).collect();
    let opts = SweepOptions { mc: Some(Stage::Gamma), threads: None, poisson: false };
    sweep(&cfg, SweepParam::Thickness, &values, &opts).unwrap()
}

fn c4_thickness_scaling(sw: &SweepReport) -> Outcome {
    let mc: Vec<_> = sw.rows.iter().map(|r| (r.x.unwrap(), r.mc.unwrap())).collect();
    let p_pts: Vec<_> = mc.iter().map(|(x, m)| (*x, m.rates.p)).collect();
    let p_sig: Vec<_> = mc.iter().map(|(_, m)| m.sigma.unwrap().p).collect();
    let r_pts: Vec<_> = mc.iter().map(|(x, m)| (*x, m.rates.r)).collect();
    let r_sig: Vec<_> = mc.iter().map(|(_, m)| m.sigma.unwrap().r).collect();
    let pw = fit_power_law(&p_pts, &Weighting::Sigma(p_sig)).map_err(|e| e.to_string())?;
    let lin = fit_linear(&r_pts, Some(&r_sig)).map_err(|e| e.to_string())?;
    let z = lin.intercept / lin.intercept_sigma;
    check(
        (1.0..=1.25).contains(&pw.exponent) && z > 3.0,
        format!(
            "P ∝ t^{:.3} ± {:.3}; R = c + g·t with c = {:.2e} ± {:.1e} ({z:.1}σ)",
            pw.exponent, pw.exponent_sigma, lin.intercept, lin.intercept_sigma
        ),
    )
}

fn c5_mip_peak() -> Outcome {
    let mut cfg = Config::default();
    cfg.mc.histories = 1_000_000;
    cfg.mc.copies = 1;
    cfg.output.phase_space = false;
    let res = run_stage(&cfg, Stage::Cosmic, None).map_err(|e| e.to_string())?;
    let mode = spectrum_mode(&res.spectrum).ok_or("empty spectrum")?;
    check((130.0..=210.0).contains(&mode), format!("deposited-energy mode {mode:.1} keV"))
}

fn c6_attenuation() -> Outcome {
    let cases = [
        ("concrete", 1460.8, 10.0),
        ("Al", 609.3, 3.0),
        ("Si", 100.0, 1.0),
        ("GaAs", 2614.5, 2.0),
        ("concrete", 50.0, 0.5),
    ];
    let mut worst: f64 = 0.0;
    for (i, (name, e, x)) in cases.iter().enumerate() {
        let mat = material(name).map_err(|e| e.to_string())?;
        let expected = (-mat.attenuation_coefficient(*e, Process::Total).unwrap() * x).exp();
        let geom = SlabGeometry::new(vec![Layer::new(mat, *x)], 0.0).unwrap();
        let cfg = TransportConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let dir = -Vec3::Z;
        let rec = PhaseSpaceRecord::new(Species::Photon, *e, Vec3::ZERO, dir);
        let n = 100_000;
        let mut passed = 0u32;
        for _ in 0..n {
            let out = transport(&rec, &geom, &mut rng, &cfg).unwrap();
            if out.exiting.iter().any(|r| r.energy_kev == *e && r.direction == dir) {
                passed += 1;
            }
        }
        let f = passed as f64 / n as f64;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        worst = worst.max(((f - expected) / sigma).abs());
    }
    check(worst < 3.0, format!("5 pairs, worst pull {worst:.2}σ"))
}

/// Mean scattered photon energy by Simpson integration of the density.
fn kn_mean(energy_kev: f64) -> f64 {
    let lo = 1.0 / (1.0 + 2.0 * energy_kev / 510.998_95);
    let n = 20_000;
    let h = (1.0 - lo) / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let e = lo + h * i as f64;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let f = klein_nishina_density(energy_kev, e);
        num += w * e * f;
        den += w * f;
    }
    energy_kev * num / den
}

fn c7_klein_nishina() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for e in [100.0, 500.0, 1000.0, 2614.5] {
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = sample_klein_nishina(e, &mut rng).epsilon * e;
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let sd = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        worst = worst.max(((mean - kn_mean(e)) / sd).abs());
    }
    check(worst < 3.0, format!("4 energies, worst pull {worst:.2}σ"))
}

/// 4 GeV muons crossing a plane at 0.02 /cm²/s over 1 m².
fn muon_beam(n: u64, isotropic: bool, seed: u64) -> PhaseSpace {
    const FLUX: f64 = 0.02;
    const AREA: f64 = 1.0e4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ps = PhaseSpace::new(n as f64 / (FLUX * AREA), AREA);
    let side = AREA.sqrt();
    for h in 0..n {
        let dir = if isotropic {
            // crossing density ∝ cos θ for an isotropic radiance
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

fn c8_reaiming() -> Outcome {
    let s = SubstrateSpec::nominal();
    let bx = s.bounding_box();
    let h = bx.half;
    let top = 4.0 * h.x * h.y;
    let side = 4.0 * (h.x + h.y) * 2.0 * h.z;
    let mut lines = Vec::new();
    let mut ok = true;
    for (isotropic, seed) in [(false, 31), (true, 32)] {
        let ps = muon_beam(100_000, isotropic, seed);
        let target = ReaimTarget::around(&bx, ps.generation_area_cm2).unwrap();
        let live = ps.effective_time_s * target.area_ratio().unwrap();
        let cfg = DepositConfig { straggling: Straggling::None, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let spec = deposit_recycled(&ps, &s, &target, 1, &cfg, live, &mut rng).unwrap();
        let sum = summarize_spectrum(&spec, M_THRESHOLD_KEV).unwrap();
        let expected = 0.02 * if isotropic { top + side / 2.0 } else { top };
        let pull = (sum.rates.r - expected) / sum.sigma.unwrap().r;
        let ratio = spec.live_time_s() / ps.effective_time_s;
        let ratio_expected = ps.generation_area_cm2 / (std::f64::consts::PI * target.radius_cm * target.radius_cm);
        ok &= pull.abs() < 3.0 && ratio == ratio_expected;
        lines.push(format!(
            "{}: {:.4e} vs {:.4e} /s ({pull:+.2}σ), time ratio {}",
            if isotropic { "isotropic" } else { "vertical" },
            sum.rates.r,
            expected,
            if ratio == ratio_expected { "exact" } else { "off" }
        ));
    }
    check(ok, lines.join("; "))
}

fn c9_elevation() -> Outcome {
    let mut cfg = Config::default();
    cfg.mc.histories = 1_000_000;
    cfg.mc.copies = 1;
    cfg.output.phase_space = false;
    cfg.cosmic = cfg.cosmic.only(&[Species::MuonMinus, Species::MuonPlus]);
    let values: Vec<String> = ["0m", "1000m", "2000m", "3000m"].iter().map(|s| s.to_string()).collect();
    let opts = SweepOptions { mc: Some(Stage::Cosmic), threads: None, poisson: false };
    let sw = sweep(&cfg, SweepParam::Elevation, &values, &opts).map_err(|e| e.to_string())?;
    let pts: Vec<_> = sw.rows.iter().map(|r| (r.x.unwrap(), r.mc.unwrap().rates.r)).collect();
    let sig: Vec<_> = sw.rows.iter().map(|r| r.mc.unwrap().sigma.unwrap().r).collect();
    let fit = fit_exponential(&pts, &Weighting::Sigma(sig)).map_err(|e| e.to_string())?;
    let lambda = fit.scale_height.ok_or("fit diverges")?;
    check(
        (lambda / 5000.0 - 1.0).abs() <= 0.2,
        format!("λ = {lambda:.0} ± {:.0} m vs 5000 m", fit.scale_height_sigma.unwrap_or(f64::NAN)),
    )
}

/// Nominal gamma run with four times the sweep statistics: the deposited
/// power carries heavy-tailed 1/|cos θ| weights, so single 10⁶-decay runs
/// scatter by about ±10% around their mean.
fn c10_cross_validation(sw: &SweepReport) -> Outcome {
    let row = sw.rows.iter().find(|r| r.value == "500um").ok_or("no nominal point")?;
    let mut cfg = Config::default();
    cfg.mc.histories = 4_000_000;
    cfg.mc.copies = 8;
    cfg.mc.seed = 1010;
    cfg.output.phase_space = false;
    let mc = run_stage(&cfg, Stage::Gamma, None).map_err(|e| e.to_string())?.summary;
    let sig = mc.sigma.unwrap();
    let dr = mc.rates.r / row.gamma.r - 1.0;
    let dp = mc.rates.p / row.gamma.p - 1.0;
    check(
        dr.abs() <= 0.5 && dp.abs() <= 0.5,
        format!(
            "R {:.4} ± {:.4} vs {:.4} /s ({:+.0}%), P {:.2} ± {:.2} vs {:.2} keV/s ({:+.0}%)",
            mc.rates.r,
            sig.r,
            row.gamma.r,
            100.0 * dr,
            mc.rates.p,
            sig.p,
            row.gamma.p,
            100.0 * dp
        ),
    )
}

const MATERIALS: [&str; 6] = ["Si", "Al2O3", "GaAs", "GaN", "SiC", "SiO2"];

fn substrate() -> impl Strategy<Value = SubstrateSpec> {
    (0..MATERIALS.len(), 1.0f64..3000.0, 0.5f64..50.0, 0.5f64..50.0).prop_map(|(m, t, w, l)| SubstrateSpec {
        material: material(MATERIALS[m]).unwrap(),
        thickness_um: t,
        width_mm: w,
        length_mm: l,
    })
}

fn environment() -> impl Strategy<Value = EnvironmentSpec> {
    (0.0f64..4000.0, 0.0f64..100.0, prop::array::uniform5(0.0f64..500.0)).prop_map(|(h, d, a)| EnvironmentSpec {
        elevation_m: h,
        ceiling_cm: d,
        aluminum_cm: 1.0,
        activities: ChainActivities(a),
    })
}

fn rates(s: &SubstrateSpec, env: &EnvironmentSpec) -> RateTriple {
    compute_rates(s, env, &SourceParams::default(), &ScaleHeight::default()).unwrap().total
}

fn spectrum(events: &[f64], t: f64) -> DepositSpectrum {
    let mut s = DepositSpectrum::new(Binning::default_deposit(), t).unwrap();
    for &e in events {
        s.fill(e, 1.0);
    }
    s
}

fn c11_properties() -> Outcome {
    let mut runner = TestRunner::new(PropConfig { cases: 256, failure_persistence: None, ..PropConfig::default() });
    let mut passed = Vec::new();
    let mut run = |name: &str, r: Result<(), String>| -> Result<(), String> {
        r.map_err(|e| format!("{name}: {e}"))?;
        passed.push(name.to_string());
        Ok(())
    };

    run(
        "linear in area",
        runner
            .run(&(substrate(), environment(), 0.5f64..50.0), |(s, env, w2)| {
                let inv = 1.0 / s.width_mm + 1.0 / s.length_mm - 1.0 / w2;
                prop_assume!(inv > 1e-3);
                let s2 = SubstrateSpec { width_mm: w2, length_mm: 1.0 / inv, ..s.clone() };
                let k = s2.area_mm2() / s.area_mm2();
                let (a, b) = (rates(&s, &env), rates(&s2, &env));
                for (x, y) in [(a.r, b.r), (a.p, b.p), (a.m, b.m)] {
                    prop_assert!((y - k * x).abs() <= 1e-9 * y.max(1e-300));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "monotone in τ, ã, H",
        runner
            .run(
                &(substrate(), environment(), 0.0f64..500.0, 0.0f64..2000.0, 0usize..5, 0.0f64..100.0),
                |(s, env, dt, dh, chain, da)| {
                    let base = rates(&s, &env);
                    let thicker = rates(&SubstrateSpec { thickness_um: s.thickness_um + dt, ..s.clone() }, &env);
                    let higher = rates(&s, &EnvironmentSpec { elevation_m: env.elevation_m + dh, ..env.clone() });
                    let mut more = env.clone();
                    more.activities.0[chain] += da;
                    for o in [thicker, higher, rates(&s, &more)] {
                        prop_assert!(o.r >= base.r && o.p >= base.p && o.m >= base.m);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;
    run(
        "R ≥ M",
        runner
            .run(&(substrate(), environment()), |(s, env)| {
                let r = rates(&s, &env);
                prop_assert!(r.r >= r.m && r.m >= 0.0);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "energy conserved per history",
        runner
            .run(&(0usize..6, 1.5f64..6.0, -1.0f64..-0.05, any::<u64>(), 0.5f64..30.0), |(k, log_e, cos, seed, d)| {
                let species = [
                    Species::Photon,
                    Species::Electron,
                    Species::Positron,
                    Species::MuonMinus,
                    Species::Proton,
                    Species::Neutron,
                ][k];
                let e = 10f64.powf(log_e);
                let dir = Vec3::new((1.0 - cos * cos).sqrt(), 0.0, cos);
                let rec = PhaseSpaceRecord::new(species, e, Vec3::ZERO, dir);
                let geom = SlabGeometry::ceiling(d, 1.0).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let out = transport(&rec, &geom, &mut rng, &TransportConfig::default()).unwrap();
                prop_assert!((out.accounted_energy() - e).abs() <= 1e-6 * e);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    let events = prop::collection::vec(0.5f64..2e5, 0..30);
    run(
        "merge commutes",
        runner
            .run(&(events.clone(), events, 0.1f64..100.0, 0.1f64..100.0), |(xs, ys, ta, tb)| {
                let (a, b) = (spectrum(&xs, ta), spectrum(&ys, tb));
                for mode in [MergeMode::Partitions, MergeMode::Sources] {
                    let ab = merge_spectra(&[a.clone(), b.clone()], mode).unwrap();
                    let ba = merge_spectra(&[b.clone(), a.clone()], mode).unwrap();
                    prop_assert_eq!(ab.counts(), ba.counts());
                    prop_assert_eq!(ab.live_time_s(), ba.live_time_s());
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    let mut few = TestRunner::new(PropConfig { cases: 8, failure_persistence: None, ..PropConfig::default() });
    run(
        "seed determinism",
        few.run(&(any::<u64>(), 2usize..6), |(seed, threads)| {
            let s = SubstrateSpec::nominal();
            let env = EnvironmentSpec::default();
            let cfg = McConfig { histories: 30_000, batch_size: 7_000, seed, threads: Some(1), ..Default::default() };
            let a = run_gamma(&s, &env, &cfg).unwrap();
            let b = run_gamma(&s, &env, &McConfig { threads: Some(threads), ..cfg }).unwrap();
            prop_assert_eq!(a.spectrum.counts(), b.spectrum.counts());
            prop_assert_eq!(a.summary.rates, b.summary.rates);
            Ok(())
        })
        .map_err(|e| e.to_string()),
    )?;
    Ok(format!("{} suites: {}", passed.len(), passed.join(", ")))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed().as_secs_f64();
        let (tag, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {n:>2}. {name}: {detail} [{dt:.1} s]");
    };
    report(1, "nominal analytic triple", &mut c1_nominal);
    report(2, "thin-wafer limit", &mut c2_thin_limit);
    report(3, "once-per-hour check", &mut c3_once_per_hour);
    let t0 = Instant::now();
    let sw = thickness_sweep();
    println!("      (gamma thickness sweep, 5 × 10⁶ decays: {:.1} s)", t0.elapsed().as_secs_f64());
    report(4, "gamma MC thickness scaling", &mut || c4_thickness_scaling(&sw));
    report(5, "MIP peak", &mut c5_mip_peak);
    report(6, "attenuation oracle", &mut c6_attenuation);
    report(7, "Klein-Nishina oracle", &mut c7_klein_nishina);
    report(8, "re-aiming unbiasedness", &mut c8_reaiming);
    report(9, "elevation self-consistency", &mut c9_elevation);
    report(10, "gamma cross-validation band", &mut || c10_cross_validation(&sw));
    report(11, "property suites", &mut c11_properties);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
