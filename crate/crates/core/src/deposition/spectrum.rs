use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Binning;

const MAGIC: &str = "radbkg-spec";

/// Sums kept alongside the histogram while a run is in memory: exact
/// deposited energy and second moments per independent history group.
/// Not persisted in CSV files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExactTally {
    /// Σ w·E (keV).
    pub energy_kev: f64,
    /// Σ over groups of (Σ w)².
    pub count_sq: f64,
    /// Σ over groups of (Σ w·E)².
    pub energy_sq: f64,
    /// Unweighted number of events.
    pub events: u64,
}

impl ExactTally {
    fn add(&mut self, o: &ExactTally) {
        self.energy_kev += o.energy_kev;
        self.count_sq += o.count_sq;
        self.energy_sq += o.energy_sq;
        self.events += o.events;
    }

    fn scaled(&self, f: f64) -> ExactTally {
        ExactTally {
            energy_kev: self.energy_kev * f,
            count_sq: self.count_sq * f * f,
            energy_sq: self.energy_sq * f * f,
            events: self.events,
        }
    }
}

/// Histogram of per-event deposited energy with its live time.
///
/// Events below the first edge go to `underflow`, at or above the last edge
/// to `overflow`. Zero deposits are never recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepositSpectrum {
    binning: Binning,
    counts: Vec<f64>,
    underflow: f64,
    overflow: f64,
    live_time_s: f64,
    exact: Option<ExactTally>,
}

/// How `merge_spectra` treats live times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    /// Pieces of one run: counts and live times add.
    Partitions,
    /// Independent sources over the same period: rates add; the result
    /// keeps the first spectrum's live time.
    Sources,
}

impl DepositSpectrum {
    pub fn new(binning: Binning, live_time_s: f64) -> Result<Self> {
        if !(live_time_s > 0.0) || !live_time_s.is_finite() {
            return Err(Error::invalid(format!("live time {live_time_s} s must be > 0")));
        }
        let n = binning.len();
        Ok(DepositSpectrum {
            binning,
            counts: vec![0.0; n],
            underflow: 0.0,
            overflow: 0.0,
            live_time_s,
            exact: Some(ExactTally::default()),
        })
    }

    pub fn binning(&self) -> &Binning {
        &self.binning
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn underflow(&self) -> f64 {
        self.underflow
    }

    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    pub fn live_time_s(&self) -> f64 {
        self.live_time_s
    }

    pub fn exact(&self) -> Option<&ExactTally> {
        self.exact.as_ref()
    }

    /// Weighted number of recorded events.
    pub fn total(&self) -> f64 {
        self.underflow + self.counts.iter().sum::<f64>() + self.overflow
    }

    fn put(&mut self, energy_kev: f64, weight: f64) {
        if energy_kev < self.binning.lo() {
            self.underflow += weight;
        } else if let Some(i) = self.binning.find(energy_kev) {
            self.counts[i] += weight;
        } else {
            self.overflow += weight;
        }
    }

    /// Record one event. Nonpositive deposits are ignored.
    pub fn fill(&mut self, energy_kev: f64, weight: f64) {
        self.fill_group(&[(energy_kev, weight)]);
    }

    /// Record events that share one source history (for example re-used
    /// copies of the same shielding history). They enter the histogram
    /// separately but count as one sample in the variance estimate.
    pub fn fill_group(&mut self, events: &[(f64, f64)]) {
        let mut w_sum = 0.0;
        let mut e_sum = 0.0;
        let mut n = 0;
        for &(e, w) in events {
            if !(e > 0.0) || !(w > 0.0) {
                continue;
            }
            self.put(e, w);
            w_sum += w;
            e_sum += w * e;
            n += 1;
        }
        if n == 0 {
            return;
        }
        if let Some(t) = &mut self.exact {
            t.energy_kev += e_sum;
            t.count_sq += w_sum * w_sum;
            t.energy_sq += e_sum * e_sum;
            t.events += n;
        }
    }

    /// Bin rows with their [lo, hi) edges, including the underflow row
    /// `[0, lo)` and overflow row `[hi, inf)`.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        let e = self.binning.edges();
        let mut rows = Vec::with_capacity(self.counts.len() + 2);
        rows.push((0.0, e[0], self.underflow));
        for (i, &c) in self.counts.iter().enumerate() {
            rows.push((e[i], e[i + 1], c));
        }
        rows.push((e[e.len() - 1], f64::INFINITY, self.overflow));
        rows
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {MAGIC} v1 live_time_s={}", self.live_time_s)?;
        writeln!(w, "bin_lo_keV,bin_hi_keV,count")?;
        for (lo, hi, c) in self.rows() {
            if hi.is_infinite() {
                writeln!(w, "{lo},inf,{c}")?;
            } else {
                writeln!(w, "{lo},{hi},{c}")?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<DepositSpectrum> {
        let mut live = None;
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let perr = |m: &str| Error::Parse { line: i + 1, message: m.to_string() };
            if i == 0 {
                let body = line.strip_prefix('#').ok_or_else(|| perr("missing spectrum header"))?;
                let mut toks = body.split_whitespace();
                if toks.next() != Some(MAGIC) || toks.next() != Some("v1") {
                    return Err(perr("not a radbkg-spec v1 file"));
                }
                for t in toks {
                    if let Some(v) = t.strip_prefix("live_time_s=") {
                        live = Some(v.parse::<f64>().map_err(|_| perr("bad live time"))?);
                    }
                }
                continue;
            }
            if line.is_empty() || line.starts_with('#') || line.starts_with("bin_lo") {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(perr("expected bin_lo_keV,bin_hi_keV,count"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr("bad number"));
            let hi = if f[1] == "inf" { f64::INFINITY } else { num(f[1])? };
            let c = num(f[2])?;
            if !(c >= 0.0) {
                return Err(perr("counts must be >= 0"));
            }
            rows.push((num(f[0])?, hi, c));
        }
        let live = live.ok_or_else(|| Error::Parse { line: 1, message: "header lacks live_time_s".into() })?;
        let mut underflow = 0.0;
        let mut overflow = 0.0;
        let mut edges = Vec::new();
        let mut counts = Vec::new();
        for (lo, hi, c) in rows {
            if hi.is_infinite() {
                overflow += c;
            } else if lo == 0.0 && edges.is_empty() {
                underflow += c;
            } else {
                if let Some(&last) = edges.last() {
                    if last != lo {
                        return Err(Error::invalid("spectrum bins are not contiguous"));
                    }
                } else {
                    edges.push(lo);
                }
                edges.push(hi);
                counts.push(c);
            }
        }
        let mut s = DepositSpectrum::new(Binning::from_edges(edges)?, live)?;
        s.counts = counts;
        s.underflow = underflow;
        s.overflow = overflow;
        s.exact = None;
        Ok(s)
    }
}

/// Combine spectra with identical binning.
pub fn merge_spectra(spectra: &[DepositSpectrum], mode: MergeMode) -> Result<DepositSpectrum> {
    let first = spectra.first().ok_or_else(|| Error::invalid("cannot merge an empty list of spectra"))?;
    let mut out = first.clone();
    for s in &spectra[1..] {
        if s.binning != out.binning {
            return Err(Error::BinningMismatch);
        }
        let f = match mode {
            MergeMode::Partitions => {
                out.live_time_s += s.live_time_s;
                1.0
            }
            MergeMode::Sources => first.live_time_s / s.live_time_s,
        };
        for (a, b) in out.counts.iter_mut().zip(&s.counts) {
            *a += b * f;
        }
        out.underflow += s.underflow * f;
        out.overflow += s.overflow * f;
        out.exact = match (out.exact, s.exact) {
            (Some(mut a), Some(b)) => {
                a.add(&b.scaled(f));
                Some(a)
            }
            _ => None,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(events: &[f64], t: f64) -> DepositSpectrum {
        let mut s = DepositSpectrum::new(Binning::default_deposit(), t).unwrap();
        for &e in events {
            s.fill(e, 1.0);
        }
        s
    }

    #[test]
    fn under_and_overflow() {
        let s = spec(&[0.5, 2.0, 2.0e5, 0.0, -1.0], 1.0);
        assert_eq!(s.underflow(), 1.0);
        assert_eq!(s.overflow(), 1.0);
        assert_eq!(s.total(), 3.0);
        assert_eq!(s.exact().unwrap().events, 3);
    }

    #[test]
    fn grouped_events_count_as_one_sample() {
        let mut grouped = spec(&[], 1.0);
        grouped.fill_group(&[(100.0, 2.0); 8]);
        let mut single = spec(&[], 1.0);
        for _ in 0..8 {
            single.fill(100.0, 2.0);
        }
        assert_eq!(grouped.counts(), single.counts());
        assert_eq!(grouped.exact().unwrap().count_sq, 256.0);
        assert_eq!(single.exact().unwrap().count_sq, 32.0);
        assert_eq!(grouped.exact().unwrap().energy_sq, 1600.0 * 1600.0);
    }

    #[test]
    fn csv_round_trip() {
        let s = spec(&[0.5, 3.0, 170.0, 170.0, 2.0e5], 12.5);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# radbkg-spec v1 live_time_s=12.5\n"));
        let back = DepositSpectrum::read_csv(&buf[..]).unwrap();
        assert_eq!(back.counts(), s.counts());
        assert_eq!(back.binning(), s.binning());
        assert_eq!(back.underflow(), 1.0);
        assert_eq!(back.overflow(), 1.0);
        assert_eq!(back.live_time_s(), 12.5);
        assert!(back.exact().is_none());
    }

    #[test]
    fn merge_rules() {
        let a = spec(&[10.0, 20.0], 1.0);
        let empty = spec(&[], 3.0);
        let m = merge_spectra(&[a.clone(), empty], MergeMode::Partitions).unwrap();
        assert_eq!(m.counts(), a.counts());
        assert_eq!(m.live_time_s(), 4.0);
        let other = DepositSpectrum::new(Binning::log(1.0, 10.0, 5).unwrap(), 1.0).unwrap();
        assert!(matches!(merge_spectra(&[a.clone(), other], MergeMode::Partitions), Err(Error::BinningMismatch)));
        let k = merge_spectra(&[a.clone(), a.clone(), a.clone()], MergeMode::Partitions).unwrap();
        assert_eq!(k.total() / k.live_time_s(), a.total() / a.live_time_s());
        // sources: rates add
        let b = spec(&[10.0], 2.0);
        let s = merge_spectra(&[a.clone(), b], MergeMode::Sources).unwrap();
        assert_eq!(s.live_time_s(), 1.0);
        assert!((s.total() - 2.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn merge_commutes(xs in prop::collection::vec(0.5f64..2e5, 0..30),
                          ys in prop::collection::vec(0.5f64..2e5, 0..30),
                          ta in 0.1f64..100.0, tb in 0.1f64..100.0) {
            let a = spec(&xs, ta);
            let b = spec(&ys, tb);
            let ab = merge_spectra(&[a.clone(), b.clone()], MergeMode::Partitions).unwrap();
            let ba = merge_spectra(&[b, a], MergeMode::Partitions).unwrap();
            prop_assert_eq!(ab.counts(), ba.counts());
            prop_assert_eq!(ab.live_time_s(), ba.live_time_s());
            prop_assert_eq!(ab.total(), ba.total());
        }
    }
}
