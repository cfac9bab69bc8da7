//! Orthonormal wavelet filters, periodised discrete wavelet transforms and
//! cascade evaluation of the wavelet system on dyadic grids.

mod cascade;
mod filter;
mod transform;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cascade::{evaluate_wavelet, mother_wavelet, scaling_function, DyadicSamples, WaveletSamples, MAX_RESOLUTION};
pub use filter::{build_filter, highpass_moment_residual, WaveletFamily, WaveletFilter, MAX_ORDER, MIN_ORDER};
pub use transform::{forward_dwt, inverse_dwt, log2_exact, Normalization, WaveletPyramid};

use crate::error::{Error, Result};

/// Uniform periodised grid of `2^levels` points on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicGrid {
    pub levels: u32,
    pub start: f64,
    pub end: f64,
}

impl DyadicGrid {
    pub fn new(levels: u32, start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::ParameterOutOfRange {
                name: "grid".into(),
                reason: format!("[{start}, {end}) is not a nonempty finite interval"),
            });
        }
        if levels > 24 {
            return Err(Error::ParameterOutOfRange {
                name: "levels".into(),
                reason: format!("{levels} exceeds 24"),
            });
        }
        Ok(Self { levels, start, end })
    }

    /// `2^levels` points on `[0, 1)`.
    pub fn unit(levels: u32) -> Self {
        Self { levels, start: 0.0, end: 1.0 }
    }

    pub fn point_count(&self) -> usize {
        1 << self.levels
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.point_count() as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.point_count()).map(|i| self.point(i)).collect()
    }
}

/// Forward transforms of many independent signals, in input order.
pub fn forward_dwt_batch(signals: &[Vec<f64>], filter: &WaveletFilter, coarsest_level: u32) -> Result<Vec<WaveletPyramid>> {
    signals.par_iter().map(|s| forward_dwt(s, filter, coarsest_level)).collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn grid_geometry() {
        let g = DyadicGrid::new(5, -1.0, 3.0).unwrap();
        assert_eq!(g.point_count(), 32);
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.point_count() as f64 * g.spacing(), g.length());
        assert_eq!(g.point(3), -1.0 + 3.0 * 0.125);
        assert!(DyadicGrid::new(3, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(order in 1usize..=10, levels in 1u32..=10, j0_frac in 0.0f64..1.0, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..1usize << levels).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let j0 = ((levels as f64) * j0_frac) as u32;
            let f = WaveletFilter::daubechies(order).unwrap();
            let p = forward_dwt(&x, &f, j0.min(levels - 1)).unwrap();
            let energy: f64 = x.iter().map(|v| v * v).sum();
            prop_assert!((p.energy() - energy).abs() <= 1e-10 * energy);
            let back = inverse_dwt(&p, &f).unwrap();
            let norm = energy.sqrt();
            let err = x.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-10 * norm);
        }
    }

    #[test]
    fn batch_matches_sequential() {
        let f = WaveletFilter::daubechies(3).unwrap();
        let signals: Vec<Vec<f64>> = (0..8).map(|s| (0..64).map(|i| ((i * (s + 1)) as f64).sin()).collect()).collect();
        let batch = forward_dwt_batch(&signals, &f, 1).unwrap();
        for (s, p) in signals.iter().zip(&batch) {
            assert_eq!(&forward_dwt(s, &f, 1).unwrap(), p);
        }
    }
}
