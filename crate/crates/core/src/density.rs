//! Discretized level densities on an interval: empirical histograms and
//! solver output share this carrier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("empty or degenerate bin range [{lo}, {hi}]")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("no samples to histogram")]
    NoSamples,
}

/// A density ρ on a grid of ascending abscissae, with its quadrature mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub mass: f64,
}

impl GridDensity {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must be ascending");
        assert!(values.iter().all(|v| v.is_finite()), "density values must be finite");
        let mass = trapezoid_mass(&grid, &values);
        Self { grid, values, mass }
    }

    /// Histogram of `samples` over `bins` equal-width bins spanning the
    /// sample range, normalized so the integral equals
    /// `samples.len() / n_groups` (the average count per group, e.g. modes
    /// per trajectory).
    pub fn histogram(samples: &[f64], bins: usize, n_groups: usize) -> Result<Self, DensityError> {
        if samples.is_empty() {
            return Err(DensityError::NoSamples);
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(DensityError::DegenerateRange { lo, hi });
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &x in samples {
            let mut b = ((x - lo) / width) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b] += 1;
        }
        let norm = n_groups.max(1) as f64 * width;
        let grid: Vec<f64> = (0..bins).map(|b| lo + (b as f64 + 0.5) * width).collect();
        let values: Vec<f64> = counts.iter().map(|&c| c as f64 / norm).collect();
        Ok(Self::new(grid, values))
    }

    /// L² distance between this density and another function on the same
    /// grid, by the trapezoid rule.
    pub fn l2_distance_to<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let sq: Vec<f64> =
            self.grid.iter().zip(&self.values).map(|(&x, &v)| (v - f(x)).powi(2)).collect();
        trapezoid_mass(&self.grid, &sq).sqrt()
    }
}

fn trapezoid_mass(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_single_bin_for_identical_samples_fails_range() {
        let r = GridDensity::histogram(&[1.0, 1.0, 1.0], 4, 1);
        assert!(matches!(r, Err(DensityError::DegenerateRange { .. })));
    }

    #[test]
    fn histogram_mass_counts_per_group() {
        let samples: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let d = GridDensity::histogram(&samples, 20, 10).unwrap();
        // 1000 samples over 10 groups -> mass ~ 100 (trapezoid endpoints bite a bin)
        assert!((d.mass - 100.0).abs() < 6.0, "mass {}", d.mass);
    }
}
