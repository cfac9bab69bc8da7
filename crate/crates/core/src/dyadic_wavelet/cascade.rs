//! Pointwise evaluation of scaling functions and wavelets on dyadic points.
//!
//! The iteration starts from the exact values of the scaling function at the
//! integers (the eigenvector of the two-scale matrix for eigenvalue one) and
//! applies the refinement equation `phi(x) = sqrt(2) sum_n h_n phi(2x - n)`
//! once per halving of the resolution.

use nalgebra::{DMatrix, DVector};

use super::filter::WaveletFilter;
use super::DyadicGrid;
use crate::error::{Error, Result};

/// Refinement beyond this resolution would allocate more than a few
/// hundred megabytes.
pub const MAX_RESOLUTION: u32 = 24;

/// Samples of a function supported on `[0, 2N-1]` at the points `m / 2^resolution`.
#[derive(Debug, Clone)]
pub struct DyadicSamples {
    pub resolution: u32,
    pub values: Vec<f64>,
    /// Number of refinement steps applied to the integer values.
    pub refinements: u32,
    /// Sup-norm change of the refinement equation on the points shared by
    /// the last two iterates.
    pub residual: f64,
}

impl DyadicSamples {
    /// Value at `m / 2^resolution`, zero outside the support.
    pub fn at(&self, m: i64) -> f64 {
        if m < 0 {
            0.0
        } else {
            self.values.get(m as usize).copied().unwrap_or(0.0)
        }
    }
}

/// Two-scale coefficients `sqrt(2) h_n` and `sqrt(2) g_n`, exact for Haar.
fn two_scale(filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    if filter.order == 1 {
        return (vec![1.0, 1.0], vec![1.0, -1.0]);
    }
    let s = std::f64::consts::SQRT_2;
    (
        filter.lowpass.iter().map(|h| s * h).collect(),
        filter.highpass.iter().map(|g| s * g).collect(),
    )
}

fn integer_values(filter: &WaveletFilter) -> Result<Vec<f64>> {
    let last = filter.support_length();
    if filter.order == 1 {
        // Right-continuous box function.
        return Ok(vec![1.0, 0.0]);
    }
    // Unknowns phi(1), ..., phi(last - 1); phi vanishes at both ends.
    let n = last - 1;
    let h = &filter.lowpass;
    let mut a = DMatrix::zeros(n, n);
    for row in 0..n {
        let m = row + 1;
        for col in 0..n {
            let l = col + 1;
            let idx = 2 * m as i64 - l as i64;
            if (0..h.len() as i64).contains(&idx) {
                a[(row, col)] = std::f64::consts::SQRT_2 * h[idx as usize];
            }
        }
        a[(row, row)] -= 1.0;
    }
    // Replace the last equation by the normalisation sum phi(m) = 1.
    for col in 0..n {
        a[(n - 1, col)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let v = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ShapeMismatch("singular two-scale system".into()))?;
    let mut out = vec![0.0; last + 1];
    out[1..last].copy_from_slice(v.as_slice());
    Ok(out)
}

/// Scaling function at resolution `2^-resolution`.
pub fn scaling_function(filter: &WaveletFilter, resolution: u32) -> Result<DyadicSamples> {
    if resolution > MAX_RESOLUTION {
        return Err(Error::ResolutionTooCoarse { level: resolution as i64, levels: MAX_RESOLUTION });
    }
    let support = filter.support_length();
    let (c, _) = two_scale(filter);
    let mut current = integer_values(filter)?;
    let mut residual = 0.0;
    for r in 1..=resolution {
        let scale = 1usize << r;
        let prev_scale = scale / 2;
        let mut next = vec![0.0; support * scale + 1];
        for (m, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (n, &h) in c.iter().enumerate() {
                // phi(2 x - n) at x = m / 2^r sits at index m - n 2^(r-1) of the previous level.
                let idx = m as i64 - (n * prev_scale) as i64;
                if idx >= 0 && (idx as usize) < current.len() {
                    acc += h * current[idx as usize];
                }
            }
            *slot = acc;
        }
        residual = current
            .iter()
            .enumerate()
            .map(|(m, &v)| (next[2 * m] - v).abs())
            .fold(0.0, f64::max);
        current = next;
    }
    Ok(DyadicSamples {
        resolution,
        values: current,
        refinements: resolution,
        residual,
    })
}

/// Mother wavelet `psi(y) = sqrt(2) sum_n g_n phi(2y - n)` at resolution
/// `2^-resolution` (which must be at least one).
pub fn mother_wavelet(filter: &WaveletFilter, resolution: u32) -> Result<DyadicSamples> {
    if resolution == 0 {
        return Err(Error::ResolutionTooCoarse { level: 0, levels: 0 });
    }
    let phi = scaling_function(filter, resolution - 1)?;
    let (_, d) = two_scale(filter);
    let scale = 1usize << resolution;
    let half = scale / 2;
    let support = filter.support_length();
    let values = (0..=support * scale)
        .map(|m| {
            d.iter()
                .enumerate()
                .map(|(n, &g)| g * phi.at(m as i64 - (n * half) as i64))
                .sum()
        })
        .collect();
    Ok(DyadicSamples {
        resolution,
        values,
        refinements: phi.refinements,
        residual: phi.residual,
    })
}

#[derive(Debug, Clone)]
pub struct WaveletSamples {
    pub values: Vec<f64>,
    pub refinements: u32,
    pub residual: f64,
}

/// Values of the periodised `phi_{j,k}(x) = (2^j/L)^{1/2} psi(2^j (x-a)/L - k)`
/// at the points of `grid`.
pub fn evaluate_wavelet(filter: &WaveletFilter, level: i64, shift: i64, grid: &DyadicGrid) -> Result<WaveletSamples> {
    let levels = grid.levels;
    if level < 0 || level >= levels as i64 {
        return Err(Error::ResolutionTooCoarse { level, levels });
    }
    let j = level as u32;
    let resolution = levels - j;
    let psi = mother_wavelet(filter, resolution)?;
    let n = grid.point_count() as i64;
    let per_unit = 1i64 << resolution;
    let shift = shift.rem_euclid(1i64 << j);
    let amp = (2f64.powi(j as i32) / grid.length()).sqrt();
    let values = (0..n)
        .map(|i| {
            let base = (i - shift * per_unit).rem_euclid(n);
            let mut acc = 0.0;
            let mut m = base;
            while (m as usize) < psi.values.len() {
                acc += psi.values[m as usize];
                m += n;
            }
            amp * acc
        })
        .collect();
    Ok(WaveletSamples {
        values,
        refinements: psi.refinements,
        residual: psi.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_mother_wavelet_on_sixteen_points() {
        let grid = DyadicGrid::unit(4);
        let w = evaluate_wavelet(&WaveletFilter::haar(), 0, 0, &grid).unwrap();
        for (i, v) in w.values.iter().enumerate() {
            let expected = if i < 8 { 1.0 } else { -1.0 };
            assert_eq!(*v, expected, "i={i}");
        }
    }

    #[test]
    fn zero_mean_for_all_filters() {
        let grid = DyadicGrid::unit(10);
        for order in 1..=10 {
            let f = WaveletFilter::daubechies(order).unwrap();
            for (j, k) in [(0, 0), (3, 5), (6, 40)] {
                let w = evaluate_wavelet(&f, j, k, &grid).unwrap();
                let integral: f64 = w.values.iter().sum::<f64>() * grid.spacing();
                assert!(integral.abs() < 1e-6, "N={order} j={j}: {integral}");
            }
        }
    }

    #[test]
    fn unit_norm_at_fine_resolution() {
        let grid = DyadicGrid::unit(12);
        for order in [1, 3, 4, 6, 10] {
            let f = WaveletFilter::daubechies(order).unwrap();
            let w = evaluate_wavelet(&f, 1, 1, &grid).unwrap();
            let norm2: f64 = w.values.iter().map(|v| v * v).sum::<f64>() * grid.spacing();
            assert!((norm2 - 1.0).abs() < 1e-4, "N={order}: {norm2}");
        }
    }

    #[test]
    fn d4_cascade_fixed_point_residual() {
        let f = WaveletFilter::daubechies(2).unwrap();
        let phi = scaling_function(&f, 10).unwrap();
        assert_eq!(phi.refinements, 10);
        assert!(phi.residual < 1e-8, "{}", phi.residual);
        // Partition of unity at the finest points.
        let sum: f64 = (0..1024).map(|m| (0..3).map(|s| phi.at(m + s * 1024)).sum::<f64>()).fold(0.0, |a, b: f64| a.max((b - 1.0).abs()));
        assert!(sum < 1e-12, "{sum}");
    }

    #[test]
    fn translates_are_exact_shifts() {
        let grid = DyadicGrid::unit(8);
        let f = WaveletFilter::daubechies(3).unwrap();
        let j = 3;
        let step = 1usize << (8 - j);
        let base = evaluate_wavelet(&f, j, 0, &grid).unwrap().values;
        for k in 1..8 {
            let w = evaluate_wavelet(&f, j, k, &grid).unwrap().values;
            for i in 0..256 {
                assert_eq!(w[(i + k as usize * step) % 256], base[i]);
            }
        }
    }

    #[test]
    fn unresolvable_level() {
        let grid = DyadicGrid::unit(4);
        let f = WaveletFilter::haar();
        assert!(matches!(evaluate_wavelet(&f, 4, 0, &grid), Err(Error::ResolutionTooCoarse { .. })));
        assert!(evaluate_wavelet(&f, -1, 0, &grid).is_err());
    }
}
