//! Compactly supported orthonormal wavelet filters.
//!
//! Daubechies filters are obtained by spectral factorisation of the
//! half-band polynomial `P(y) = sum_k C(N-1+k, k) y^k`, keeping the zeros
//! inside the unit circle, and then polished with a few Newton steps on the
//! full set of orthonormality and moment equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 1;
pub const MAX_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveletFamily {
    Haar,
    Daubechies,
}

impl std::fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaveletFamily::Haar => f.write_str("haar"),
            WaveletFamily::Daubechies => f.write_str("daubechies"),
        }
    }
}

/// An orthonormal two-channel filter pair.
///
/// `lowpass` and `highpass` both have `2 * order` taps and are linked by
/// `g_k = (-1)^k h_{2N-1-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletFilter {
    pub family: WaveletFamily,
    pub order: usize,
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl WaveletFilter {
    pub fn haar() -> Self {
        build_filter(WaveletFamily::Haar, 1).expect("haar is always available")
    }

    pub fn daubechies(order: usize) -> Result<Self> {
        build_filter(WaveletFamily::Daubechies, order)
    }

    pub fn taps(&self) -> usize {
        self.lowpass.len()
    }

    /// Length of the support interval `[0, 2N-1]` of the scaling function.
    pub fn support_length(&self) -> usize {
        2 * self.order - 1
    }

    pub fn name(&self) -> String {
        match self.family {
            WaveletFamily::Haar => "haar".to_string(),
            WaveletFamily::Daubechies => format!("daubechies:{}", self.order),
        }
    }

    /// Parses `haar`, `daubechies:N` or `dbN`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "haar" {
            return Ok(Self::haar());
        }
        let order = lower
            .strip_prefix("daubechies:")
            .or_else(|| lower.strip_prefix("db"))
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| Error::ParameterOutOfRange {
                name: "filter".into(),
                reason: format!("cannot parse `{name}`, expected `haar` or `daubechies:N`"),
            })?;
        Self::daubechies(order)
    }

    /// Largest violation of the four filter invariants, one entry each:
    /// lowpass sum, orthonormality, quadrature mirror relation and
    /// (scale-relative) vanishing moments.
    pub fn invariant_residuals(&self) -> [f64; 4] {
        let h = &self.lowpass;
        let g = &self.highpass;
        let len = h.len();
        let sum = (h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs();

        let mut orth: f64 = 0.0;
        for m in 0..self.order {
            let dot: f64 = (0..len.saturating_sub(2 * m)).map(|k| h[k] * h[k + 2 * m]).sum();
            let target = if m == 0 { 1.0 } else { 0.0 };
            orth = orth.max((dot - target).abs());
        }

        let qmf = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (g[k] - sign * h[len - 1 - k]).abs()
            })
            .fold(0.0, f64::max);

        let moments = highpass_moment_residual(g, self.order);
        [sum, orth, qmf, moments]
    }
}

/// Largest relative residual of `sum_k k^l g_k` for `l < order`.
///
/// Moments are taken about the centre of the filter and divided by
/// `sum_k |k - c|^l |g_k|`; the raw moments of high order are sums of
/// terms of size `(2N)^l` so only their relative cancellation is meaningful
/// in floating point.
pub fn highpass_moment_residual(g: &[f64], order: usize) -> f64 {
    let centre = (g.len() as f64 - 1.0) / 2.0;
    let mut worst: f64 = 0.0;
    for l in 0..order {
        let mut moment = 0.0;
        let mut scale = 0.0;
        for (k, &gk) in g.iter().enumerate() {
            let t = (k as f64 - centre).powi(l as i32);
            moment += t * gk;
            scale += (t * gk).abs();
        }
        if scale > 0.0 {
            worst = worst.max(moment.abs() / scale);
        }
    }
    worst
}

pub fn build_filter(family: WaveletFamily, order: usize) -> Result<WaveletFilter> {
    match family {
        WaveletFamily::Haar if order != 1 => Err(Error::UnsupportedOrder { order, min: 1, max: 1 }),
        _ if !(MIN_ORDER..=MAX_ORDER).contains(&order) => Err(Error::UnsupportedOrder {
            order,
            min: MIN_ORDER,
            max: MAX_ORDER,
        }),
        _ => {
            let lowpass = if order == 1 {
                vec![std::f64::consts::FRAC_1_SQRT_2; 2]
            } else {
                let raw = spectral_factor(order);
                polish(raw, order)
            };
            let highpass = mirror(&lowpass);
            Ok(WaveletFilter { family, order, lowpass, highpass })
        }
    }
}

fn mirror(h: &[f64]) -> Vec<f64> {
    let len = h.len();
    (0..len)
        .map(|k| if k % 2 == 0 { h[len - 1 - k] } else { -h[len - 1 - k] })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn spectral_factor(order: usize) -> Vec<f64> {
    // P(y) = sum_{k<N} C(N-1+k, k) y^k, y = sin^2(w/2)
    let coeffs: Vec<f64> = (0..order).map(|k| binomial(order - 1 + k, k)).collect();
    let y_roots = polynomial_roots(&coeffs);

    // y = (2 - z - 1/z) / 4  <=>  z^2 - (2 - 4y) z + 1 = 0; keep |z| < 1.
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for y in y_roots {
        let b = Complex64::new(2.0, 0.0) - 4.0 * y;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) / 2.0;
        let z2 = (b - disc) / 2.0;
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        poly = poly_mul(&poly, &[-z, Complex64::new(1.0, 0.0)]);
    }
    for _ in 0..order {
        poly = poly_mul(&poly, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }

    // Highest power first gives the customary h_0 > 0 orientation.
    let mut h: Vec<f64> = poly.iter().rev().map(|c| c.re).collect();
    let total: f64 = h.iter().sum();
    let scale = std::f64::consts::SQRT_2 / total;
    h.iter_mut().for_each(|v| *v *= scale);
    h
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn poly_deriv_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

/// Roots of a real polynomial given in increasing-power order
/// (Durand-Kerner iteration followed by Newton polishing).
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..degree].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| seed.powu(k as u32) * radius.min(2.0))
        .collect();

    for _ in 0..2000 {
        let mut shift: f64 = 0.0;
        for i in 0..degree {
            let zi = roots[i];
            let denom = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &zj)| acc * (zi - zj));
            let delta = poly_eval(&monic, zi) / denom;
            roots[i] = zi - delta;
            shift = shift.max(delta.norm() / (1.0 + zi.norm()));
        }
        if shift < 1e-15 {
            break;
        }
    }
    for root in roots.iter_mut() {
        for _ in 0..5 {
            let d = poly_deriv_eval(&monic, *root);
            if d.norm() == 0.0 {
                break;
            }
            *root -= poly_eval(&monic, *root) / d;
        }
    }
    roots
}

/// Residuals of the defining system: lowpass sum, orthonormality for shifts
/// `0..N`, and centred highpass moments `1..N`.
fn system(h: &[f64], order: usize) -> DVector<f64> {
    let len = h.len();
    let centre = (len as f64 - 1.0) / 2.0;
    let mut r = DVector::zeros(2 * order);
    r[0] = h.iter().sum::<f64>() - std::f64::consts::SQRT_2;
    for m in 0..order {
        let dot: f64 = (0..len - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
        r[1 + m] = dot - if m == 0 { 1.0 } else { 0.0 };
    }
    let g = mirror(h);
    for l in 1..order {
        r[order + l] = g
            .iter()
            .enumerate()
            .map(|(k, gk)| (k as f64 - centre).powi(l as i32) * gk)
            .sum();
    }
    r
}

/// Jacobian of [`system`], with moment rows scaled by `|k - c|^l` sums so
/// that every row is of unit size.
fn jacobian(h: &[f64], order: usize) -> (DMatrix<f64>, Vec<f64>) {
    let len = h.len();
    let centre = (len as f64 - 1.0) / 2.0;
    let mut jac = DMatrix::zeros(2 * order, len);
    let mut row_scale = vec![1.0; 2 * order];
    for i in 0..len {
        jac[(0, i)] = 1.0;
    }
    for m in 0..order {
        for i in 0..len {
            let mut d = 0.0;
            if i + 2 * m < len {
                d += h[i + 2 * m];
            }
            if i >= 2 * m {
                d += h[i - 2 * m];
            }
            jac[(1 + m, i)] = d;
        }
    }
    for l in 1..order {
        let row = order + l;
        row_scale[row] = (0..len).map(|k| (k as f64 - centre).abs().powi(l as i32)).sum::<f64>();
        for i in 0..len {
            // g_k = (-1)^k h_{len-1-k}
            let k = len - 1 - i;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            jac[(row, i)] = sign * (k as f64 - centre).powi(l as i32);
        }
    }
    (jac, row_scale)
}

fn scaled_residual(h: &[f64], order: usize, row_scale: &[f64]) -> DVector<f64> {
    let mut r = system(h, order);
    for (v, s) in r.iter_mut().zip(row_scale) {
        *v /= s;
    }
    r
}

fn polish(mut h: Vec<f64>, order: usize) -> Vec<f64> {
    let (_, row_scale) = jacobian(&h, order);
    let mut best = scaled_residual(&h, order, &row_scale).amax();
    for _ in 0..8 {
        let r = scaled_residual(&h, order, &row_scale);
        let (mut jac, _) = jacobian(&h, order);
        for (row, s) in row_scale.iter().enumerate() {
            jac.row_mut(row).scale_mut(1.0 / s);
        }
        let Some(delta) = jac.lu().solve(&r) else { break };
        let candidate: Vec<f64> = h.iter().zip(delta.iter()).map(|(a, d)| a - d).collect();
        let res = scaled_residual(&candidate, order, &row_scale).amax();
        if res < best {
            best = res;
            h = candidate;
        } else {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_taps() {
        let f = build_filter(WaveletFamily::Haar, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(f.lowpass, vec![s, s]);
        assert_eq!(f.highpass, vec![s, -s]);
        assert_eq!(f.support_length(), 1);
        assert_eq!(build_filter(WaveletFamily::Daubechies, 1).unwrap().lowpass, f.lowpass);
    }

    #[test]
    fn order_range() {
        assert!(matches!(
            build_filter(WaveletFamily::Daubechies, 11),
            Err(Error::UnsupportedOrder { order: 11, .. })
        ));
        assert!(build_filter(WaveletFamily::Daubechies, 0).is_err());
        assert!(build_filter(WaveletFamily::Haar, 2).is_err());
    }

    #[test]
    fn all_orders_satisfy_invariants() {
        for order in 1..=MAX_ORDER {
            let f = WaveletFilter::daubechies(order).unwrap();
            let [sum, orth, qmf, moments] = f.invariant_residuals();
            assert!(sum < 1e-12, "N={order} sum {sum}");
            assert!(orth < 1e-12, "N={order} orth {orth}");
            assert_eq!(qmf, 0.0, "N={order}");
            assert!(moments < 1e-10, "N={order} moments {moments}");
            assert_eq!(f.taps(), 2 * order);
        }
    }

    #[test]
    fn daubechies_two_closed_form() {
        let s3 = 3f64.sqrt();
        let d = 4.0 * std::f64::consts::SQRT_2;
        let expected = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
        let f = WaveletFilter::daubechies(2).unwrap();
        for k in 0..4 {
            assert!((f.lowpass[k] - expected[k]).abs() < 1e-14, "{:?} vs {expected:?}", f.lowpass);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(WaveletFilter::from_name("haar").unwrap().order, 1);
        assert_eq!(WaveletFilter::from_name("daubechies:4").unwrap().order, 4);
        assert_eq!(WaveletFilter::from_name("db3").unwrap().order, 3);
        assert!(WaveletFilter::from_name("coif2").is_err());
    }
}
