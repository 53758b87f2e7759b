//! Particle records passed between the shielding stage and the substrate
//! stage, plus their CSV persistence.
//!
//! File layout:
//!
//! ```text
//! # radbkg-phsp v1 effective_time_s=<float> generation_area_cm2=<float> [sphere_center_cm=x;y;z sphere_radius_cm=r]
//! species,energy_keV,x_cm,y_cm,z_cm,ux,uy,uz,weight,history
//! ```
//!
//! The trailing `history` column groups records produced by the same
//! primary; readers accept files without it (each row is then its own
//! history).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::species::Species;

const MAGIC: &str = "radbkg-phsp";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceRecord {
    pub species: Species,
    /// Kinetic energy (keV).
    pub energy_kev: f64,
    /// cm
    pub position: Vec3,
    pub direction: Vec3,
    pub weight: f64,
    /// Index of the primary history that produced this record.
    pub history: u64,
}

impl PhaseSpaceRecord {
    pub fn new(species: Species, energy_kev: f64, position: Vec3, direction: Vec3) -> Self {
        PhaseSpaceRecord { species, energy_kev, position, direction, weight: 1.0, history: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy_kev > 0.0) || !self.energy_kev.is_finite() {
            return Err(Error::invalid(format!("record energy {} must be > 0", self.energy_kev)));
        }
        if !(self.weight >= 0.0) {
            return Err(Error::invalid("record weight must be >= 0"));
        }
        if (self.direction.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("record direction is not a unit vector"));
        }
        Ok(())
    }
}

/// Sphere that re-aimed records were aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AimSphere {
    pub center: Vec3,
    pub radius: f64,
}

/// A set of records with the exposure time it represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpace {
    pub records: Vec<PhaseSpaceRecord>,
    /// Real-world exposure time (s) represented by the records.
    pub effective_time_s: f64,
    /// Area (cm²) of the plane over which primaries were generated.
    pub generation_area_cm2: f64,
    /// Set once the records have been re-aimed.
    pub aim: Option<AimSphere>,
}

impl PhaseSpace {
    pub fn new(effective_time_s: f64, generation_area_cm2: f64) -> Self {
        PhaseSpace { records: Vec::new(), effective_time_s, generation_area_cm2, aim: None }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Concatenate partitions of one run: records appended in order,
    /// effective times added.
    pub fn merge(parts: impl IntoIterator<Item = PhaseSpace>) -> Result<PhaseSpace> {
        let mut iter = parts.into_iter();
        let mut out = iter.next().ok_or_else(|| Error::invalid("cannot merge an empty list of phase spaces"))?;
        for p in iter {
            if p.generation_area_cm2 != out.generation_area_cm2 || p.aim != out.aim {
                return Err(Error::invalid("phase-space partitions differ in geometry"));
            }
            out.effective_time_s += p.effective_time_s;
            out.records.extend(p.records);
        }
        Ok(out)
    }

    /// Slices of consecutive records sharing a history id.
    pub fn histories(&self) -> impl Iterator<Item = &[PhaseSpaceRecord]> {
        self.records.chunk_by(|a, b| a.history == b.history)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(
            w,
            "# {MAGIC} v1 effective_time_s={} generation_area_cm2={}",
            self.effective_time_s, self.generation_area_cm2
        )?;
        if let Some(s) = &self.aim {
            write!(w, " sphere_center_cm={};{};{} sphere_radius_cm={}", s.center.x, s.center.y, s.center.z, s.radius)?;
        }
        writeln!(w)?;
        writeln!(w, "species,energy_keV,x_cm,y_cm,z_cm,ux,uy,uz,weight,history")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.species,
                r.energy_kev,
                r.position.x,
                r.position.y,
                r.position.z,
                r.direction.x,
                r.direction.y,
                r.direction.z,
                r.weight,
                r.history
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<PhaseSpace> {
        let mut lines = r.lines().enumerate();
        let (_, header) =
            lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty phase-space file".into() })?;
        let header = header?;
        let mut ps = parse_header(&header)?;
        let mut implicit_history = 0u64;
        for (i, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("species,") {
                continue;
            }
            let perr = |m: String| Error::Parse { line: i + 1, message: m };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 9 && f.len() != 10 {
                return Err(perr(format!("expected 9 or 10 fields, got {}", f.len())));
            }
            let species: Species = f[0].parse().map_err(|e: Error| perr(e.to_string()))?;
            let num =
                |k: usize| -> Result<f64> { f[k].parse::<f64>().map_err(|e| perr(format!("field {}: {e}", k + 1))) };
            let history = if f.len() == 10 {
                f[9].parse::<u64>().map_err(|e| perr(format!("history: {e}")))?
            } else {
                implicit_history += 1;
                implicit_history - 1
            };
            let rec = PhaseSpaceRecord {
                species,
                energy_kev: num(1)?,
                position: Vec3::new(num(2)?, num(3)?, num(4)?),
                direction: Vec3::new(num(5)?, num(6)?, num(7)?),
                weight: num(8)?,
                history,
            };
            rec.validate().map_err(|e| perr(e.to_string()))?;
            ps.records.push(rec);
        }
        Ok(ps)
    }
}

fn parse_header(line: &str) -> Result<PhaseSpace> {
    let perr = |m: &str| Error::Parse { line: 1, message: m.to_string() };
    let body = line.strip_prefix('#').ok_or_else(|| perr("missing `# radbkg-phsp` header"))?;
    let mut toks = body.split_whitespace();
    if toks.next() != Some(MAGIC) || toks.next() != Some("v1") {
        return Err(perr("not a radbkg-phsp v1 file"));
    }
    let mut time = None;
    let mut area = None;
    let mut center = None;
    let mut radius = None;
    for tok in toks {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr("malformed header token"))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr("bad header number"));
        match k {
            "effective_time_s" => time = Some(num(v)?),
            "generation_area_cm2" => area = Some(num(v)?),
            "sphere_radius_cm" => radius = Some(num(v)?),
            "sphere_center_cm" => {
                let c: Vec<f64> = v.split(';').map(num).collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(perr("sphere_center_cm needs three components"));
                }
                center = Some(Vec3::new(c[0], c[1], c[2]));
            }
            _ => {}
        }
    }
    let mut ps = PhaseSpace::new(
        time.ok_or_else(|| perr("header lacks effective_time_s"))?,
        area.ok_or_else(|| perr("header lacks generation_area_cm2"))?,
    );
    ps.aim = match (center, radius) {
        (Some(center), Some(radius)) => Some(AimSphere { center, radius }),
        (None, None) => None,
        _ => return Err(perr("sphere_center_cm and sphere_radius_cm go together")),
    };
    Ok(ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_record() -> impl Strategy<Value = PhaseSpaceRecord> {
        (
            0usize..7,
            1e-3f64..1e8,
            prop::array::uniform3(-1e4f64..1e4),
            (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU),
            0.0f64..1e6,
            0u64..1_000_000,
        )
            .prop_map(|(s, e, p, (c, phi), w, h)| {
                let st = (1.0 - c * c).sqrt();
                PhaseSpaceRecord {
                    species: Species::ALL[s],
                    energy_kev: e,
                    position: Vec3::new(p[0], p[1], p[2]),
                    direction: Vec3::new(st * phi.cos(), st * phi.sin(), c),
                    weight: w,
                    history: h,
                }
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            recs in prop::collection::vec(arb_record(), 0..20),
            t in 1e-6f64..1e9,
            aimed in any::<bool>(),
        ) {
            let mut ps = PhaseSpace::new(t, 1.0e6);
            ps.records = recs;
            if aimed {
                ps.aim = Some(AimSphere { center: Vec3::new(0.1, 0.0, -0.3), radius: 0.85 });
            }
            let mut buf = Vec::new();
            ps.write_csv(&mut buf).unwrap();
            let back = PhaseSpace::read_csv(&buf[..]).unwrap();
            prop_assert_eq!(back, ps);
        }
    }

    #[test]
    fn header_is_required() {
        assert!(PhaseSpace::read_csv(&b"gamma,1,0,0,0,0,0,1,1\n"[..]).is_err());
        let text = "# radbkg-phsp v1 effective_time_s=2.5 generation_area_cm2=100\n\
                    gamma,100,0,0,0,0,0,1,1\ne-,50,0,0,0,0,0,1,1\n";
        let ps = PhaseSpace::read_csv(text.as_bytes()).unwrap();
        assert_eq!(ps.effective_time_s, 2.5);
        assert_eq!(ps.records[1].history, 1);
        let bad = "# radbkg-phsp v1 effective_time_s=2.5 generation_area_cm2=100\n\
                   gamma,100,0,0,0,0,0,2,1\n";
        assert!(PhaseSpace::read_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn merge_adds_time_and_concatenates() {
        let mut a = PhaseSpace::new(1.0, 10.0);
        a.records.push(PhaseSpaceRecord::new(Species::Photon, 1.0, Vec3::ZERO, Vec3::Z));
        let b = PhaseSpace::new(2.0, 10.0);
        let m = PhaseSpace::merge([a, b]).unwrap();
        assert_eq!(m.effective_time_s, 3.0);
        assert_eq!(m.len(), 1);
        assert!(PhaseSpace::merge([PhaseSpace::new(1.0, 1.0), PhaseSpace::new(1.0, 2.0)]).is_err());
    }
}
