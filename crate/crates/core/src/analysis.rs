//! Reduction of deposit spectra to (R, M, P) and the scaling-law fits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::deposition::DepositSpectrum;
use crate::error::{Error, Result};
use crate::rate_model::RateTriple;

/// Default M threshold (keV).
pub const M_THRESHOLD_KEV: f64 = 1000.0;

/// Rates from a spectrum with their uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRates {
    pub rates: RateTriple,
    /// Largest possible error in P from using bin centres, for events
    /// inside the binned range (keV/s). Overflow events are counted at the
    /// upper edge and only bound P from below.
    pub p_quantization: f64,
    /// One-sigma statistical errors. `None` for spectra read back from
    /// disk, which lack the second moments.
    pub sigma: Option<RateTriple>,
    /// P from the exact deposits rather than bin centres, when known.
    pub p_exact: Option<f64>,
}

/// R, M and P of a spectrum. A bin counts towards M when its lower edge is
/// at or above `threshold_kev`.
pub fn spectrum_to_rates(spec: &DepositSpectrum, threshold_kev: f64) -> Result<RateTriple> {
    Ok(summarize_spectrum(spec, threshold_kev)?.rates)
}

pub fn summarize_spectrum(spec: &DepositSpectrum, threshold_kev: f64) -> Result<SpectrumRates> {
    let t = spec.live_time_s();
    if !(t > 0.0) {
        return Err(Error::invalid("spectrum live time must be > 0"));
    }
    let mut total = 0.0;
    let mut high = 0.0;
    let mut energy = 0.0;
    let mut half_width: f64 = 0.0;
    let mut binned = 0.0;
    for (lo, hi, c) in spec.rows() {
        total += c;
        if lo >= threshold_kev {
            high += c;
        }
        if hi.is_infinite() {
            energy += lo * c;
        } else {
            energy += 0.5 * (lo + hi) * c;
            binned += c;
            if c > 0.0 {
                half_width = half_width.max(0.5 * (hi - lo));
            }
        }
    }
    let rates = RateTriple { r: total / t, p: energy / t, m: high / t };
    let sigma = spec.exact().map(|x| {
        // groups may hold several events; inflate the Poisson error on M by
        // the same factor the tally gives for R
        let inflation = if total > 0.0 { x.count_sq / total } else { 0.0 };
        RateTriple { r: x.count_sq.sqrt() / t, p: x.energy_sq.sqrt() / t, m: (high * inflation).sqrt() / t }
    });
    Ok(SpectrumRates {
        rates,
        p_quantization: half_width * binned / t,
        sigma,
        p_exact: spec.exact().map(|x| x.energy_kev / t),
    })
}

/// Energy (keV) at the peak of dN/dE: centre of the bin with the largest
/// count per unit energy. `None` for an empty spectrum.
pub fn spectrum_mode(spec: &DepositSpectrum) -> Option<f64> {
    let b = spec.binning();
    let mut best: Option<(usize, f64)> = None;
    for (i, &c) in spec.counts().iter().enumerate() {
        let density = c / b.width(i);
        if c > 0.0 && best.is_none_or(|(_, d)| density > d) {
            best = Some((i, density));
        }
    }
    best.map(|(i, _)| b.center(i))
}

/// How points are weighted in a fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Weighting {
    #[default]
    Uniform,
    /// Treat each y as proportional to a Poisson count: var(log y) ∝ 1/y.
    Poisson,
    /// Explicit one-sigma errors on y.
    Sigma(Vec<f64>),
}

impl Weighting {
    /// Weights for a fit in log y.
    fn log_weights(&self, ys: &[f64]) -> Result<Vec<f64>> {
        match self {
            Weighting::Uniform => Ok(vec![1.0; ys.len()]),
            Weighting::Poisson => Ok(ys.to_vec()),
            Weighting::Sigma(s) => {
                check_sigmas(s, ys.len())?;
                Ok(ys.iter().zip(s).map(|(y, s)| (y / s).powi(2)).collect())
            }
        }
    }
}

fn check_sigmas(s: &[f64], n: usize) -> Result<()> {
    if s.len() != n {
        return Err(Error::invalid(format!("{} sigmas for {n} points", s.len())));
    }
    if s.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("sigmas must be > 0"));
    }
    Ok(())
}

/// Weighted least-squares line through (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub intercept_sigma: f64,
    pub slope_sigma: f64,
    /// Weighted RMS of the residuals.
    pub residual: f64,
    pub n_points: usize,
}

/// Solve the weighted normal equations. With `absolute` the weights are
/// 1/σ² and the covariance is used as is; otherwise it is scaled by the
/// residual variance.
fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64], absolute: bool) -> Result<LinearFit> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::invalid("a line fit needs at least 2 points"));
    }
    let sw: f64 = ws.iter().sum();
    let sx: f64 = xs.iter().zip(ws).map(|(x, w)| w * x).sum();
    let sy: f64 = ys.iter().zip(ws).map(|(y, w)| w * y).sum();
    let xm = sx / sw;
    let ym = sy / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("fit points need distinct x values"));
    }
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let chi2: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (y - intercept - slope * x).powi(2)).sum();
    let scale = if absolute {
        1.0
    } else if n > 2 {
        chi2 / (n - 2) as f64
    } else {
        0.0
    };
    let var_slope = scale / sxx;
    let var_intercept = scale * (1.0 / sw + xm * xm / sxx);
    Ok(LinearFit {
        intercept,
        slope,
        intercept_sigma: var_intercept.sqrt(),
        slope_sigma: var_slope.sqrt(),
        residual: (chi2 / sw).sqrt(),
        n_points: n,
    })
}

fn unzip(points: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    points.iter().copied().unzip()
}

/// Fit y = c + g·x. With `sigmas` the parameter errors follow from them;
/// otherwise from the scatter of the points.
pub fn fit_linear(points: &[(f64, f64)], sigmas: Option<&[f64]>) -> Result<LinearFit> {
    let (xs, ys) = unzip(points);
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("fit points must be finite"));
    }
    match sigmas {
        Some(s) => {
            check_sigmas(s, points.len())?;
            let ws: Vec<f64> = s.iter().map(|s| 1.0 / (s * s)).collect();
            weighted_line(&xs, &ys, &ws, true)
        }
        None => weighted_line(&xs, &ys, &vec![1.0; xs.len()], false),
    }
}

/// y = amplitude · x^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub exponent_sigma: f64,
    /// RMS misfit in ln y.
    pub residual: f64,
    pub n_points: usize,
}

pub fn fit_power_law(points: &[(f64, f64)], weighting: &Weighting) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!("power-law fit needs at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|(x, y)| !(*x > 0.0) || !(*y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("power-law fit needs positive x and y"));
    }
    let (xs, ys) = unzip(points);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let ws = weighting.log_weights(&ys)?;
    let absolute = matches!(weighting, Weighting::Sigma(_));
    let f = weighted_line(&lx, &ly, &ws, absolute)?;
    Ok(PowerLawFit {
        amplitude: f.intercept.exp(),
        exponent: f.slope,
        exponent_sigma: f.slope_sigma,
        residual: rms(&lx, &ly, f.intercept, f.slope),
        n_points: points.len(),
    })
}

/// rate = rate0 · exp(H/λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub rate0: f64,
    /// d ln(rate) / dH (1/m).
    pub slope: f64,
    pub slope_sigma: f64,
    /// λ = 1/slope; `None` when the slope is indistinguishable from zero,
    /// i.e. the fitted scale height diverges.
    pub scale_height: Option<f64>,
    /// One-sigma error on λ from the slope error.
    pub scale_height_sigma: Option<f64>,
    /// RMS misfit in ln(rate).
    pub residual: f64,
    pub n_points: usize,
}

impl ExponentialFit {
    pub fn diverges(&self) -> bool {
        self.scale_height.is_none()
    }
}

pub fn fit_exponential(points: &[(f64, f64)], weighting: &Weighting) -> Result<ExponentialFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!("exponential fit needs at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|(h, r)| !(*r > 0.0) || !h.is_finite() || !r.is_finite()) {
        return Err(Error::invalid("exponential fit needs positive rates"));
    }
    let (hs, rs) = unzip(points);
    let lr: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ws = weighting.log_weights(&rs)?;
    let absolute = matches!(weighting, Weighting::Sigma(_));
    let f = weighted_line(&hs, &lr, &ws, absolute)?;
    let span = hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat = (f.slope * span).abs() <= 1e-12;
    let (lambda, lambda_sigma) =
        if flat { (None, None) } else { (Some(1.0 / f.slope), Some(f.slope_sigma / (f.slope * f.slope))) };
    Ok(ExponentialFit {
        rate0: f.intercept.exp(),
        slope: f.slope,
        slope_sigma: f.slope_sigma,
        scale_height: lambda,
        scale_height_sigma: lambda_sigma,
        residual: rms(&hs, &lr, f.intercept, f.slope),
        n_points: points.len(),
    })
}

fn rms(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let s: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (s / xs.len() as f64).sqrt()
}

/// Machine-readable fit summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub model: String,
    pub parameters: BTreeMap<String, f64>,
    pub residual: f64,
    pub n_points: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub diverges: bool,
}

impl From<&PowerLawFit> for FitRecord {
    fn from(f: &PowerLawFit) -> Self {
        FitRecord {
            model: "power_law".into(),
            parameters: BTreeMap::from([
                ("amplitude".into(), f.amplitude),
                ("exponent".into(), f.exponent),
                ("exponent_sigma".into(), f.exponent_sigma),
            ]),
            residual: f.residual,
            n_points: f.n_points,
            diverges: false,
        }
    }
}

impl From<&ExponentialFit> for FitRecord {
    fn from(f: &ExponentialFit) -> Self {
        let mut parameters = BTreeMap::from([("rate0".into(), f.rate0), ("slope_per_m".into(), f.slope)]);
        if let (Some(l), Some(s)) = (f.scale_height, f.scale_height_sigma) {
            parameters.insert("scale_height_m".into(), l);
            parameters.insert("scale_height_sigma_m".into(), s);
        }
        FitRecord {
            model: "exponential".into(),
            parameters,
            residual: f.residual,
            n_points: f.n_points,
            diverges: f.diverges(),
        }
    }
}

impl From<&LinearFit> for FitRecord {
    fn from(f: &LinearFit) -> Self {
        FitRecord {
            model: "linear".into(),
            parameters: BTreeMap::from([
                ("intercept".into(), f.intercept),
                ("intercept_sigma".into(), f.intercept_sigma),
                ("slope".into(), f.slope),
                ("slope_sigma".into(), f.slope_sigma),
            ]),
            residual: f.residual,
            n_points: f.n_points,
            diverges: false,
        }
    }
}
