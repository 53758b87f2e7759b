//! Quantities with mandatory unit suffixes.
//!
//! Each key has a fixed internal unit. A value written in another unit of
//! the same dimension is rescaled; units that differ by a power of ten are
//! converted with an exact multiply or divide by that power so that values
//! written in the internal unit come back bit-for-bit.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Energy,
    Rate,
    Power,
    Activity,
    Density,
    Flux,
    MassAttenuation,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dim::Length => "length",
            Dim::Energy => "energy",
            Dim::Rate => "rate",
            Dim::Power => "power",
            Dim::Activity => "specific activity",
            Dim::Density => "density",
            Dim::Flux => "flux",
            Dim::MassAttenuation => "mass attenuation",
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Scale {
    /// 10^k base units.
    Pow10(i32),
    /// Arbitrary multiple of the base unit.
    Factor(f64),
}

struct UnitDef {
    names: &'static [&'static str],
    dim: Dim,
    scale: Scale,
}

use Scale::{Factor, Pow10};

// base units: m, keV, 1/s, keV/s, Bq/kg, g/cm3, 1/(cm2 s), cm2/g
const UNITS: &[UnitDef] = &[
    UnitDef { names: &["nm"], dim: Dim::Length, scale: Pow10(-9) },
    UnitDef { names: &["um", "µm", "micron"], dim: Dim::Length, scale: Pow10(-6) },
    UnitDef { names: &["mm"], dim: Dim::Length, scale: Pow10(-3) },
    UnitDef { names: &["cm"], dim: Dim::Length, scale: Pow10(-2) },
    UnitDef { names: &["m"], dim: Dim::Length, scale: Pow10(0) },
    UnitDef { names: &["km"], dim: Dim::Length, scale: Pow10(3) },
    UnitDef { names: &["eV"], dim: Dim::Energy, scale: Pow10(-3) },
    UnitDef { names: &["keV"], dim: Dim::Energy, scale: Pow10(0) },
    UnitDef { names: &["MeV"], dim: Dim::Energy, scale: Pow10(3) },
    UnitDef { names: &["GeV"], dim: Dim::Energy, scale: Pow10(6) },
    UnitDef { names: &["TeV"], dim: Dim::Energy, scale: Pow10(9) },
    UnitDef { names: &["/s", "1/s", "s^-1", "Hz"], dim: Dim::Rate, scale: Pow10(0) },
    UnitDef { names: &["/min", "1/min"], dim: Dim::Rate, scale: Factor(1.0 / 60.0) },
    UnitDef { names: &["/h", "1/h"], dim: Dim::Rate, scale: Factor(1.0 / 3600.0) },
    UnitDef { names: &["/day", "1/day"], dim: Dim::Rate, scale: Factor(1.0 / 86400.0) },
    UnitDef { names: &["eV/s"], dim: Dim::Power, scale: Pow10(-3) },
    UnitDef { names: &["keV/s"], dim: Dim::Power, scale: Pow10(0) },
    UnitDef { names: &["MeV/s"], dim: Dim::Power, scale: Pow10(3) },
    UnitDef { names: &["mBq/kg"], dim: Dim::Activity, scale: Pow10(-3) },
    UnitDef { names: &["Bq/kg"], dim: Dim::Activity, scale: Pow10(0) },
    UnitDef { names: &["Bq/g"], dim: Dim::Activity, scale: Pow10(3) },
    UnitDef { names: &["g/cm3", "g/cm^3"], dim: Dim::Density, scale: Pow10(0) },
    UnitDef { names: &["kg/m3", "kg/m^3"], dim: Dim::Density, scale: Pow10(-3) },
    UnitDef { names: &["/cm2/s", "1/cm2/s", "cm^-2 s^-1", "/cm^2/s"], dim: Dim::Flux, scale: Pow10(0) },
    UnitDef { names: &["/m2/s", "1/m2/s", "m^-2 s^-1", "/m^2/s"], dim: Dim::Flux, scale: Pow10(-4) },
    UnitDef { names: &["/cm2/min", "1/cm2/min"], dim: Dim::Flux, scale: Factor(1.0 / 60.0) },
    UnitDef { names: &["cm2/g", "cm^2/g"], dim: Dim::MassAttenuation, scale: Pow10(0) },
];

fn lookup(name: &str, dim: Dim) -> Option<Scale> {
    UNITS.iter().find(|u| u.dim == dim && u.names.contains(&name)).map(|u| u.scale)
}

/// Accepted spellings for a dimension, for error messages.
pub fn unit_names(dim: Dim) -> Vec<&'static str> {
    UNITS.iter().filter(|u| u.dim == dim).map(|u| u.names[0]).collect()
}

fn pow10(x: f64, k: i32) -> f64 {
    match k.cmp(&0) {
        std::cmp::Ordering::Equal => x,
        std::cmp::Ordering::Greater => x * 10f64.powi(k),
        std::cmp::Ordering::Less => x / 10f64.powi(-k),
    }
}

fn convert(x: f64, from: Scale, to: Scale) -> f64 {
    match (from, to) {
        (Pow10(a), Pow10(b)) => pow10(x, a - b),
        (Pow10(a), Factor(b)) => pow10(x, a) / b,
        (Factor(a), Pow10(b)) => pow10(x * a, -b),
        (Factor(a), Factor(b)) => x * a / b,
    }
}

/// Split "500 um" or "500um" into number and unit.
pub fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    // the longest prefix that parses as a number
    let mut ends: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(text.len());
    for &end in ends.iter().rev() {
        if let Ok(v) = text[..end].trim().parse::<f64>() {
            return Some((v, text[end..].trim()));
        }
    }
    None
}

/// Parse `text` as a quantity of `dim`, returned in `target`.
pub fn parse_quantity(text: &str, dim: Dim, target: &str) -> Result<f64, String> {
    let to = lookup(target, dim).unwrap_or_else(|| panic!("internal unit {target} is not a {dim} unit"));
    let (v, unit) = split_number(text).ok_or_else(|| format!("`{text}` is not a number with a unit"))?;
    if !v.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    if unit.is_empty() {
        return Err(format!("`{text}` lacks a unit; {dim} needs one of {}", unit_names(dim).join(", ")));
    }
    let from = lookup(unit, dim)
        .ok_or_else(|| format!("unknown {dim} unit `{unit}` (expected one of {})", unit_names(dim).join(", ")))?;
    Ok(convert(v, from, to))
}

/// Parse a bare number (no unit allowed).
pub fn parse_plain(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let v: f64 = t.parse().map_err(|_| format!("`{t}` is not a plain number"))?;
    if !v.is_finite() {
        return Err(format!("`{t}` is not finite"));
    }
    Ok(v)
}

/// Parse a nonnegative integer; `1e6` and `1_000_000` are accepted.
pub fn parse_count(text: &str) -> Result<u64, String> {
    let t = text.trim().replace('_', "");
    if let Ok(n) = t.parse::<u64>() {
        return Ok(n);
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) => Ok(v as u64),
        _ => Err(format!("`{}` is not a whole number", text.trim())),
    }
}
