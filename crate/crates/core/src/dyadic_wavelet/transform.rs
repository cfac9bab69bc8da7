use serde::{Deserialize, Serialize};

use super::filter::WaveletFilter;
use crate::error::{Error, Result};

/// How the coefficients of a pyramid relate to the continuum inner products
/// `<phi_{j,k}, f>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Normalization {
    /// Plain orthonormal DWT of the sample vector.
    Discrete,
    /// Discrete coefficients multiplied by `sqrt(spacing)`.
    Continuum { spacing: f64 },
}

/// Periodised multilevel decomposition.
///
/// `details[i]` holds the `2^(j0 + i)` coefficients of level `j0 + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletPyramid {
    pub coarsest_level: u32,
    pub scaling: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub normalization: Normalization,
}

impl WaveletPyramid {
    pub fn zeros(coarsest_level: u32, levels: u32) -> Self {
        Self {
            coarsest_level,
            scaling: vec![0.0; 1 << coarsest_level],
            details: (coarsest_level..levels).map(|j| vec![0.0; 1 << j]).collect(),
            normalization: Normalization::Discrete,
        }
    }

    /// Number of levels `J` of the signal this pyramid describes.
    pub fn levels(&self) -> u32 {
        self.coarsest_level + self.details.len() as u32
    }

    pub fn signal_len(&self) -> usize {
        1 << self.levels()
    }

    pub fn detail(&self, level: u32) -> Option<&[f64]> {
        level
            .checked_sub(self.coarsest_level)
            .and_then(|i| self.details.get(i as usize))
            .map(Vec::as_slice)
    }

    pub fn detail_mut(&mut self, level: u32) -> Option<&mut Vec<f64>> {
        level
            .checked_sub(self.coarsest_level)
            .and_then(move |i| self.details.get_mut(i as usize))
    }

    pub fn energy(&self) -> f64 {
        self.scaling.iter().chain(self.details.iter().flatten()).map(|v| v * v).sum()
    }

    /// Rescales to continuum inner products for a grid of the given spacing.
    pub fn calibrated(mut self, spacing: f64) -> Self {
        let factor = match self.normalization {
            Normalization::Discrete => spacing.sqrt(),
            Normalization::Continuum { spacing: old } => (spacing / old).sqrt(),
        };
        self.scale(factor);
        self.normalization = Normalization::Continuum { spacing };
        self
    }

    /// Back to plain orthonormal DWT coefficients.
    pub fn discrete(mut self) -> Self {
        if let Normalization::Continuum { spacing } = self.normalization {
            self.scale(1.0 / spacing.sqrt());
        }
        self.normalization = Normalization::Discrete;
        self
    }

    fn scale(&mut self, factor: f64) {
        for v in self.scaling.iter_mut().chain(self.details.iter_mut().flatten()) {
            *v *= factor;
        }
    }
}

pub fn log2_exact(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// One analysis step on a periodic signal of even length.
pub(crate) fn analysis_step(x: &[f64], filter: &WaveletFilter, approx: &mut Vec<f64>, detail: &mut Vec<f64>) {
    let len = x.len();
    let half = len / 2;
    approx.clear();
    detail.clear();
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (n, (&h, &g)) in filter.lowpass.iter().zip(&filter.highpass).enumerate() {
            let v = x[(2 * k + n) % len];
            a += h * v;
            d += g * v;
        }
        approx.push(a);
        detail.push(d);
    }
}

/// Adjoint of [`analysis_step`].
pub(crate) fn synthesis_step(approx: &[f64], detail: &[f64], filter: &WaveletFilter, out: &mut Vec<f64>) {
    let len = 2 * approx.len();
    out.clear();
    out.resize(len, 0.0);
    for k in 0..approx.len() {
        let (a, d) = (approx[k], detail[k]);
        for (n, (&h, &g)) in filter.lowpass.iter().zip(&filter.highpass).enumerate() {
            out[(2 * k + n) % len] += h * a + g * d;
        }
    }
}

pub fn forward_dwt(samples: &[f64], filter: &WaveletFilter, coarsest_level: u32) -> Result<WaveletPyramid> {
    let levels = log2_exact(samples.len())?;
    if coarsest_level >= levels {
        return Err(Error::LevelOutOfRange { level: coarsest_level as i64, levels });
    }
    let mut details = Vec::with_capacity((levels - coarsest_level) as usize);
    let mut current = samples.to_vec();
    let mut approx = Vec::with_capacity(samples.len() / 2);
    for _ in coarsest_level..levels {
        let mut detail = Vec::with_capacity(current.len() / 2);
        analysis_step(&current, filter, &mut approx, &mut detail);
        details.push(detail);
        std::mem::swap(&mut current, &mut approx);
    }
    details.reverse();
    Ok(WaveletPyramid {
        coarsest_level,
        scaling: current,
        details,
        normalization: Normalization::Discrete,
    })
}

/// Inverts [`forward_dwt`]. Calibrated pyramids are converted back to
/// discrete coefficients first, so the output is always the sample vector.
pub fn inverse_dwt(pyramid: &WaveletPyramid, filter: &WaveletFilter) -> Result<Vec<f64>> {
    let factor = match pyramid.normalization {
        Normalization::Discrete => 1.0,
        Normalization::Continuum { spacing } => 1.0 / spacing.sqrt(),
    };
    if pyramid.scaling.len() != 1usize << pyramid.coarsest_level {
        return Err(Error::ShapeMismatch(format!(
            "{} scaling coefficients at level {}",
            pyramid.scaling.len(),
            pyramid.coarsest_level
        )));
    }
    for (i, d) in pyramid.details.iter().enumerate() {
        let expected = 1usize << (pyramid.coarsest_level + i as u32);
        if d.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "level {} has {} coefficients, expected {expected}",
                pyramid.coarsest_level + i as u32,
                d.len()
            )));
        }
    }
    let mut current: Vec<f64> = pyramid.scaling.iter().map(|v| v * factor).collect();
    let mut out = Vec::new();
    let mut scaled = Vec::new();
    for detail in &pyramid.details {
        scaled.clear();
        scaled.extend(detail.iter().map(|v| v * factor));
        synthesis_step(&current, &scaled, filter, &mut out);
        std::mem::swap(&mut current, &mut out);
    }
    Ok(current)
}
