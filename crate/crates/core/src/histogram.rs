use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bin edges (keV), strictly ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    edges: Vec<f64>,
}

impl Binning {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("binning needs at least two edges"));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("bin edges must be finite and strictly ascending"));
        }
        Ok(Binning { edges })
    }

    /// `n` logarithmic bins from `lo` to `hi`.
    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n == 0 {
            return Err(Error::invalid("log binning needs 0 < lo < hi and n > 0"));
        }
        let step = (hi / lo).ln() / n as f64;
        let mut edges: Vec<f64> = (0..=n).map(|i| lo * (step * i as f64).exp()).collect();
        edges[n] = hi;
        Self::from_edges(edges)
    }

    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n == 0 {
            return Err(Error::invalid("linear binning needs lo < hi and n > 0"));
        }
        let w = (hi - lo) / n as f64;
        let mut edges: Vec<f64> = (0..=n).map(|i| lo + w * i as f64).collect();
        edges[n] = hi;
        Self::from_edges(edges)
    }

    /// 200 logarithmic bins, 1 keV to 100 MeV.
    pub fn default_deposit() -> Self {
        Self::log(1.0, 1.0e5, 200).expect("static binning")
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// Bin index for a value inside `[lo, hi)`.
    pub fn find(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo() && x < self.hi()) {
            return None;
        }
        Some(self.edges.partition_point(|&e| e <= x) - 1)
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn max_width(&self) -> f64 {
        (0..self.len()).map(|i| self.width(i)).fold(0.0, f64::max)
    }
}

/// Weighted histogram over a [`Binning`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub binning: Binning,
    pub contents: Vec<f64>,
}

impl Histogram {
    pub fn new(binning: Binning) -> Self {
        let n = binning.len();
        Histogram { binning, contents: vec![0.0; n] }
    }

    /// Adds `w` at `x`; returns false if `x` is outside the binning.
    pub fn fill(&mut self, x: f64, w: f64) -> bool {
        match self.binning.find(x) {
            Some(i) => {
                self.contents[i] += w;
                true
            }
            None => false,
        }
    }

    pub fn total(&self) -> f64 {
        self.contents.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.contents.iter().all(|&c| c == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_binning_edges() {
        let b = Binning::default_deposit();
        assert_eq!(b.len(), 200);
        assert_eq!(b.lo(), 1.0);
        assert_eq!(b.hi(), 1.0e5);
        assert!((b.edges()[40] - 10.0).abs() < 1e-9);
        assert_eq!(b.find(1.0), Some(0));
        assert_eq!(b.find(1.0e5), None);
        assert_eq!(b.find(0.5), None);
        let i = b.find(2000.0).unwrap();
        assert!(b.edges()[i] <= 2000.0 && 2000.0 < b.edges()[i + 1]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Binning::from_edges(vec![1.0]).is_err());
        assert!(Binning::from_edges(vec![1.0, 1.0]).is_err());
        assert!(Binning::log(0.0, 1.0, 3).is_err());
    }
}
