//! Sampled `(abscissa, signal)` series shared by spectra and fringes.

use serde::Serialize;

use crate::error::{domain, Result};

/// An ordered series of `(x, y)` samples with strictly increasing `x`.
///
/// Used both as a spectrum (microwave detuning in rad/s, F = 2 population)
/// and as a fringe (detuning or phase, signal).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    points: Vec<(f64, f64)>,
}

pub type SpectrumTrace = Trace;
pub type FringeTrace = Trace;

impl Trace {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(domain("trace contains non-finite values"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(domain("trace abscissa must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Smallest abscissa spacing.
    pub fn min_step(&self) -> f64 {
        self.points.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::INFINITY, f64::min)
    }
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted() {
        assert!(Trace::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Trace::new(vec![(1.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Trace::new(vec![(0.0, f64::NAN)]).is_err());
        assert!(Trace::new(vec![]).unwrap().is_empty());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.5, 1.5, 7);
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], -1.5);
        assert_eq!(v[6], 1.5);
        assert!((v[3]).abs() < 1e-15);
    }
}
