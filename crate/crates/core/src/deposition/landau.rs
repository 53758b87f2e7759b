//! Landau energy-loss straggling.
//!
//! The universal density φ(λ) is evaluated once by numerical inversion of
//! its Laplace transform along a vertical line through the saddle point of
//! the integrand, where the integrand barely oscillates. Sampling uses the
//! tabulated CDF; the tail beyond the table follows the 1/λ² asymptote.
//!
//! The Landau mean is infinite, so the distribution is truncated at the λ
//! for which the mean loss equals the requested mean (chord × dE/dx).

use std::sync::OnceLock;

use rand::Rng;

use crate::materials::MaterialDef;
use crate::species::{Species, ELECTRON_MASS_KEV};

/// Location of the maximum of φ(λ).
pub const LAMBDA_MODE: f64 = -0.222_78;

const LAMBDA_MIN: f64 = -4.0;
const LAMBDA_MAX: f64 = 100.0;

/// φ(λ) by quadrature of (1/π)∫₀^∞ Re exp(s ln s + λ s) dy, s = c + iy,
/// with c at the real saddle point e^(-1-λ).
pub fn landau_density(lambda: f64) -> f64 {
    let c = (-1.0 - lambda).exp();
    let f = |y: f64| -> f64 {
        // s ln s with principal log, s = c + iy
        let ln_r = 0.5 * (c * c + y * y).ln();
        let arg = y.atan2(c);
        let re = c * ln_r - y * arg + lambda * c;
        let im = y * ln_r + c * arg + lambda * y;
        re.exp() * im.cos()
    };
    let h = (0.15 / (lambda.abs() + 6.0)).min(0.02);
    let y_max = 26.0 + 4.0 * c;
    // the phase of s turns over within |y| ~ c, so resolve that part finely
    let knee = (50.0 * c).min(y_max);
    let head = simpson(&f, 0.0, knee, h.min(knee / 200.0));
    let body = simpson(&f, knee, y_max, h);
    ((head + body) / std::f64::consts::PI).max(0.0)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = (((b - a) / h).ceil() as usize).max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

struct Table {
    lambda: Vec<f64>,
    cdf: Vec<f64>,
    /// ∫ x φ(x) dx from the table start.
    moment: Vec<f64>,
    /// Tail constant: φ(λ) ≈ tail / λ² beyond the table.
    tail: f64,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut lambda = Vec::new();
        let mut x = LAMBDA_MIN;
        while x < LAMBDA_MAX {
            lambda.push(x);
            x += if x < 10.0 {
                0.02
            } else if x < 30.0 {
                0.05
            } else {
                0.2
            };
        }
        lambda.push(LAMBDA_MAX);
        let pdf: Vec<f64> = lambda.iter().map(|&l| landau_density(l)).collect();
        let mut cdf = vec![0.0];
        let mut moment = vec![0.0];
        for i in 1..lambda.len() {
            let dx = lambda[i] - lambda[i - 1];
            cdf.push(cdf[i - 1] + 0.5 * dx * (pdf[i - 1] + pdf[i]));
            moment.push(moment[i - 1] + 0.5 * dx * (lambda[i - 1] * pdf[i - 1] + lambda[i] * pdf[i]));
        }
        let last = cdf[cdf.len() - 1];
        Table { tail: (1.0 - last) * LAMBDA_MAX, lambda, cdf, moment }
    })
}

/// P(Λ ≤ λ).
pub fn landau_cdf(lambda: f64) -> f64 {
    let t = table();
    if lambda <= LAMBDA_MIN {
        return 0.0;
    }
    if lambda >= LAMBDA_MAX {
        return 1.0 - t.tail / lambda;
    }
    let i = t.lambda.partition_point(|&x| x <= lambda).clamp(1, t.lambda.len() - 1);
    let f = (lambda - t.lambda[i - 1]) / (t.lambda[i] - t.lambda[i - 1]);
    t.cdf[i - 1] + f * (t.cdf[i] - t.cdf[i - 1])
}

fn partial_moment(lambda: f64) -> f64 {
    let t = table();
    if lambda >= LAMBDA_MAX {
        return t.moment[t.moment.len() - 1] + t.tail * (lambda / LAMBDA_MAX).ln();
    }
    let i = t.lambda.partition_point(|&x| x <= lambda).clamp(1, t.lambda.len() - 1);
    let f = (lambda - t.lambda[i - 1]) / (t.lambda[i] - t.lambda[i - 1]);
    t.moment[i - 1] + f * (t.moment[i] - t.moment[i - 1])
}

/// Mean of Λ conditioned on Λ ≤ cut.
pub fn truncated_mean(cut: f64) -> f64 {
    partial_moment(cut) / landau_cdf(cut)
}

/// Cut whose truncated mean equals `target`, if reachable.
pub fn cut_for_mean(target: f64) -> Option<f64> {
    let (mut lo, mut hi) = (LAMBDA_MODE, LAMBDA_MAX);
    if target < truncated_mean(lo) {
        return None;
    }
    while truncated_mean(hi) < target {
        hi *= 4.0;
        if hi > 1e300 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Draw Λ from the Landau distribution restricted to Λ ≤ cut.
pub fn sample_truncated<R: Rng + ?Sized>(cut: f64, rng: &mut R) -> f64 {
    let t = table();
    let u = rng.random::<f64>() * landau_cdf(cut);
    let last = t.cdf[t.cdf.len() - 1];
    if u >= last {
        return (t.tail / (1.0 - u)).min(cut);
    }
    let i = t.cdf.partition_point(|&c| c <= u).clamp(1, t.cdf.len() - 1);
    let (c0, c1) = (t.cdf[i - 1], t.cdf[i]);
    let f = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
    (t.lambda[i - 1] + f * (t.lambda[i] - t.lambda[i - 1])).min(cut)
}

/// Straggling parameters for one traversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StragglingParams {
    /// Landau width ξ (keV).
    pub xi_kev: f64,
    /// Most probable loss (keV).
    pub most_probable_kev: f64,
    /// Largest single-collision transfer (keV).
    pub t_max_kev: f64,
    pub beta_sq: f64,
}

/// K/2 in MeV cm²/mol.
const HALF_K: f64 = 0.307_075 / 2.0;

pub fn straggling_params(material: &MaterialDef, species: Species, kinetic_kev: f64, path_cm: f64) -> StragglingParams {
    let m = species.mass_kev();
    let gamma = 1.0 + kinetic_kev / m;
    let beta_sq = 1.0 - 1.0 / (gamma * gamma);
    let bg_sq = beta_sq * gamma * gamma;
    let xi_kev = 1000.0 * HALF_K * material.z_over_a() * material.density * path_cm / beta_sq;
    let t_max_kev = match species {
        Species::Electron => kinetic_kev / 2.0,
        Species::Positron => kinetic_kev,
        _ => {
            let r = ELECTRON_MASS_KEV / m;
            2.0 * ELECTRON_MASS_KEV * bg_sq / (1.0 + 2.0 * gamma * r + r * r)
        }
    };
    let i_kev = material.mean_excitation_ev / 1000.0;
    let delta = material.density_effect().delta(bg_sq.sqrt());
    let most_probable_kev =
        xi_kev * ((2.0 * ELECTRON_MASS_KEV * bg_sq / i_kev).ln() + (xi_kev / i_kev).ln() + 0.200 - beta_sq - delta);
    StragglingParams { xi_kev, most_probable_kev, t_max_kev, beta_sq }
}

/// Above this ξ/T_max the loss is drawn from a Gaussian instead.
const KAPPA_GAUSSIAN: f64 = 0.05;

/// Energy loss (keV) over a path whose mean loss is `mean_kev`.
pub fn sample_energy_loss<R: Rng + ?Sized>(
    material: &MaterialDef,
    species: Species,
    kinetic_kev: f64,
    path_cm: f64,
    mean_kev: f64,
    rng: &mut R,
) -> f64 {
    let p = straggling_params(material, species, kinetic_kev, path_cm);
    let kappa = p.xi_kev / p.t_max_kev;
    let landau = if kappa < KAPPA_GAUSSIAN && p.most_probable_kev > 0.0 {
        let target = LAMBDA_MODE + (mean_kev - p.most_probable_kev) / p.xi_kev;
        cut_for_mean(target).map(|cut| p.most_probable_kev + p.xi_kev * (sample_truncated(cut, rng) - LAMBDA_MODE))
    } else {
        None
    };
    let loss = landau.unwrap_or_else(|| {
        let sigma = (p.xi_kev * p.t_max_kev * (1.0 - 0.5 * p.beta_sq)).max(0.0).sqrt();
        mean_kev + sigma * standard_normal(rng)
    });
    loss.max(0.0)
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
