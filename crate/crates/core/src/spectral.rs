//! Discretised integral operators `Op(k)`, their singular values, Schatten
//! and Lorentz quasinorms, Hilbert-Schmidt approximation numbers, and the
//! checks relating these to each other and to Besov norms of the kernel.

use std::ops::Range;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov_analysis::{analyze_kernel, besov_seminorm, BesovParams};
use crate::dyadic_wavelet::WaveletFilter;
use crate::error::{Error, Result};
use crate::kernel_model::SampledKernel;
use crate::seqspace::{ell_p, lorentz_pq, NonnegSeq};

/// Sweep cap of the Jacobi SVD; exceeding it is a [`Error::ConvergenceFailure`].
pub const SVD_MAX_SWEEPS: usize = 60;

/// `A[i][m] = k(x_i, y_m) sqrt(hx hy)`; the Frobenius norm of `A` is the grid
/// L2 norm of `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub matrix: DMatrix<f64>,
    pub source: String,
}

impl DiscreteOperator {
    pub fn from_matrix(matrix: DMatrix<f64>, source: impl Into<String>) -> Self {
        Self { matrix, source: source.into() }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm()
    }
}

pub fn discretize(k: &SampledKernel) -> DiscreteOperator {
    let w = (k.grid_x.spacing() * k.grid_y.spacing()).sqrt();
    let matrix = DMatrix::from_row_iterator(k.rows(), k.cols(), k.values.iter().map(|v| v * w));
    DiscreteOperator { matrix, source: k.label.clone() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub mu: NonnegSeq,
    pub rank_tolerance: f64,
}

impl SingularSpectrum {
    /// Wraps a nonincreasing sequence, with the default tolerance `1e-10 mu(0)`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let mu = NonnegSeq::new(values)?;
        if !mu.is_nonincreasing() {
            return Err(Error::ShapeMismatch("singular values must be nonincreasing".into()));
        }
        let top = mu.as_slice().first().copied().unwrap_or(0.0);
        Ok(Self { mu, rank_tolerance: 1e-10 * top })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        self.mu.as_slice()
    }

    /// Number of values above the rank tolerance.
    pub fn numerical_rank(&self) -> usize {
        self.values().iter().take_while(|&&v| v > self.rank_tolerance).count()
    }
}

/// Singular triple with values in nonincreasing order; `u` is `m x r`,
/// `v` is `n x r` with `r = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Option<DMatrix<f64>>,
    pub v: Option<DMatrix<f64>>,
}

/// One-sided Jacobi SVD. Columns of `u` belonging to zero singular values
/// are zero.
pub fn svd(a: &DMatrix<f64>, vectors: bool) -> Result<Svd> {
    let r = a.nrows().min(a.ncols());
    if r == 0 {
        return Ok(Svd { sigma: Vec::new(), u: None, v: None });
    }
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose(), vectors)?;
        return Ok(Svd { sigma: t.sigma, u: t.v, v: t.u });
    }
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = if vectors { Some(DMatrix::<f64>::identity(n, n)) } else { None };
    let tol = f64::EPSILON * m as f64;
    // Couplings below roundoff of the whole matrix carry no information.
    let floor = (f64::EPSILON * a.norm()).powi(2);
    let mut converged = false;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        let mut norms: Vec<f64> = (0..n).map(|j| w.column(j).norm_squared()).collect();
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = w.column(i).dot(&w.column(j));
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma.abs() <= floor {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(w.as_mut_slice(), m, i, j, c, s);
                if let Some(v) = v.as_mut() {
                    rotate(v.as_mut_slice(), n, i, j, c, s);
                }
                norms[i] = w.column(i).norm_squared();
                norms[j] = w.column(j).norm_squared();
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(SVD_MAX_SWEEPS));
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    order.truncate(r);
    let sigma = order.iter().map(|&i| norms[i]).collect();
    let (u, v) = if vectors {
        let u = DMatrix::from_fn(m, r, |row, c| {
            let s = norms[order[c]];
            if s > 0.0 { w[(row, order[c])] / s } else { 0.0 }
        });
        let v = v.expect("vectors requested");
        (Some(u), Some(DMatrix::from_fn(n, r, |row, c| v[(row, order[c])])))
    } else {
        (None, None)
    };
    Ok(Svd { sigma, u, v })
}

/// Plane rotation of columns `i < j` of a column-major buffer with `rows` rows.
fn rotate(data: &mut [f64], rows: usize, i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(j * rows);
    let ci = &mut head[i * rows..(i + 1) * rows];
    let cj = &mut tail[..rows];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

pub fn singular_values(op: &DiscreteOperator) -> Result<SingularSpectrum> {
    let s = svd(&op.matrix, false)?;
    SingularSpectrum::from_values(s.sigma)
}

pub fn schatten(spectrum: &SingularSpectrum, p: f64) -> Result<f64> {
    ell_p(&spectrum.mu, p)
}

pub fn schatten_lorentz(spectrum: &SingularSpectrum, p: f64, q: f64) -> Result<f64> {
    lorentz_pq(&spectrum.mu, p, q)
}

/// `e_n = (sum_{k >= n+1} mu_k^2)^{1/2}`, `n = 0, ..., len - 1`.
pub fn hs_approx_numbers(spectrum: &SingularSpectrum) -> NonnegSeq {
    let mu = spectrum.values();
    let mut tail = vec![0.0; mu.len() + 1];
    for k in (0..mu.len()).rev() {
        tail[k] = tail[k + 1] + mu[k] * mu[k];
    }
    NonnegSeq::from_abs((0..mu.len()).map(|n| tail[n + 1].sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub worst_ratio: f64,
    /// `n` attaining the worst ratio.
    pub worst_n: Option<usize>,
    /// Number of `0/0` cases counted as zero.
    pub degenerate: usize,
}

/// `max_{n >= 1, 2n < len} mu(2n) n^{1/2} / e(n)`.
pub fn check_mu_estimate(spectrum: &SingularSpectrum) -> Result<MuEstimate> {
    if spectrum.len() < 3 {
        return Err(Error::SpectrumTooShort(spectrum.len(), 3));
    }
    let mu = spectrum.values();
    let e = hs_approx_numbers(spectrum);
    let mut out = MuEstimate { worst_ratio: 0.0, worst_n: None, degenerate: 0 };
    let mut n = 1;
    while 2 * n < mu.len() {
        let num = mu[2 * n] * (n as f64).sqrt();
        let ratio = if e[n] == 0.0 {
            if num == 0.0 {
                out.degenerate += 1;
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            num / e[n]
        };
        if out.worst_n.is_none() || ratio > out.worst_ratio {
            out.worst_ratio = ratio;
            out.worst_n = Some(n);
        }
        n += 1;
    }
    Ok(out)
}

/// `||(e_n / (n+1)^{1/2})||_{l_{p,q}} / ||mu||_{l_{p,q}}`.
pub fn check_lpq_equivalence(spectrum: &SingularSpectrum, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    let denom = schatten_lorentz(spectrum, p, q)?;
    if denom == 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let e = hs_approx_numbers(spectrum);
    let averaged = NonnegSeq::from_abs(e.as_slice().iter().enumerate().map(|(n, v)| v / (n as f64 + 1.0).sqrt()));
    Ok(lorentz_pq(&averaged, p, q)? / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub kernel_label: String,
    pub p: f64,
    /// `||Op(k)||_p`.
    pub lhs: f64,
    pub l2_norm: f64,
    pub seminorm: f64,
    /// `||k||_2 + |k|_{B^{1/p - 1/2}_{p,p}(L2)}`.
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSummary {
    pub p: f64,
    pub reports: Vec<EmbeddingReport>,
    pub max_ratio: f64,
}

pub fn embedding_report(k: &SampledKernel, filter: &WaveletFilter, p: f64) -> Result<EmbeddingReport> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if k.is_zero() {
        return Err(Error::ZeroKernel);
    }
    let lhs = schatten(&singular_values(&discretize(k))?, p)?;
    let field = analyze_kernel(k, filter, 0)?;
    let seminorm = besov_seminorm(&field, &BesovParams::schatten(p)?)?;
    let l2_norm = k.l2_norm();
    let rhs = l2_norm + seminorm;
    Ok(EmbeddingReport {
        kernel_label: k.label.clone(),
        p,
        lhs,
        l2_norm,
        seminorm,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Per-kernel embedding ratios (computed in parallel, reported in input
/// order) and their maximum.
pub fn verify_main_embedding(kernels: &[SampledKernel], filter: &WaveletFilter, p: f64) -> Result<EmbeddingSummary> {
    let reports = kernels
        .par_iter()
        .map(|k| embedding_report(k, filter, p))
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(EmbeddingSummary { p, reports, max_ratio })
}

/// Least-squares slope of `log mu(n)` against `log(n + 1)` over `range`.
pub fn decay_rate(spectrum: &SingularSpectrum, range: Range<usize>) -> Result<f64> {
    if range.end > spectrum.len() || range.len() < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "fit_range".into(),
            reason: format!("{range:?} needs at least two points within a spectrum of length {}", spectrum.len()),
        });
    }
    let mut pts = Vec::with_capacity(range.len());
    for n in range {
        let v = spectrum.values()[n];
        if v <= 0.0 {
            return Err(Error::NonpositiveValuesInRange(n));
        }
        pts.push(((n as f64 + 1.0).ln(), v.ln()));
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Indices `n` with `sqrt(r/10) <= n <= sqrt(10 r)`, `r` the numerical rank:
/// one decade centred (logarithmically) in the resolved part of the spectrum.
pub fn middle_decade(spectrum: &SingularSpectrum) -> Range<usize> {
    let r = spectrum.numerical_rank() as f64;
    let lo = (r / 10.0).sqrt().ceil() as usize;
    let hi = ((10.0 * r).sqrt().floor() as usize + 1).min(spectrum.numerical_rank());
    lo..hi.max(lo)
}

#[cfg(test)]
mod tests {
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dyadic_wavelet::DyadicGrid;
    use crate::kernel_model::{sample_builtin, KernelFamily, KernelSpec};

    fn random_matrix(seed: u64, m: usize, n: usize) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn spectrum_of(v: Vec<f64>) -> SingularSpectrum {
        SingularSpectrum::from_values(v).unwrap()
    }

    #[test]
    fn discretize_examples() {
        let g = DyadicGrid::new(5, 0.0, 2.0).unwrap();
        let zero = SampledKernel::zeros(g, g, "z");
        assert!(discretize(&zero).matrix.iter().all(|&v| v == 0.0));

        let k = sample_builtin(&KernelSpec::new(KernelFamily::SeparableGaussian), &g, &g).unwrap();
        let s = singular_values(&discretize(&k)).unwrap();
        assert!(s.values()[1] < 1e-10 * s.values()[0]);

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let values = (0..1024).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = SampledKernel::new(g, g, values, "r").unwrap();
        let op = discretize(&k);
        assert!((op.frobenius() - k.l2_norm()).abs() <= 1e-12 * k.l2_norm());
    }

    #[test]
    fn discretize_is_linear() {
        let g = DyadicGrid::unit(4);
        let a = SampledKernel::from_fn(g, g, "a", |x, y| x - y).unwrap();
        let b = SampledKernel::from_fn(g, g, "b", |x, y| (x * y).sin()).unwrap();
        let sum = SampledKernel::new(g, g, a.values.iter().zip(&b.values).map(|(x, y)| 2.0 * x - 3.0 * y).collect(), "s").unwrap();
        let lhs = discretize(&sum).matrix;
        let rhs = discretize(&a).matrix * 2.0 - discretize(&b).matrix * 3.0;
        assert!((lhs - rhs).amax() < 1e-15);
    }

    #[test]
    fn svd_examples() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 0.5, 0.0]));
        let s = singular_values(&DiscreteOperator::from_matrix(d, "d")).unwrap();
        for (a, b) in s.values().iter().zip([3.0, 2.0, 0.5, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }

        let xi = nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let eta = nalgebra::DVector::from_vec(vec![0.3, 0.4, 1.2, -0.7]);
        let s = singular_values(&DiscreteOperator::from_matrix(&xi * eta.transpose(), "r1")).unwrap();
        assert!((s.values()[0] - xi.norm() * eta.norm()).abs() < 1e-14);
        assert!(s.values()[1] < 1e-14);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        let a = random_matrix(31, 32, 32);
        let s = singular_values(&DiscreteOperator::from_matrix(a.clone(), "r")).unwrap();
        let energy: f64 = s.values().iter().map(|v| v * v).sum();
        assert!((energy - a.norm_squared()).abs() <= 1e-10 * energy);
        let mut eig: Vec<f64> = SymmetricEigen::new(a.transpose() * &a).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in s.values().iter().zip(&eig) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
        let t = singular_values(&DiscreteOperator::from_matrix(a.transpose(), "t")).unwrap();
        for (x, y) in s.values().iter().zip(t.values()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(s.values()[0] <= a.norm());
    }

    #[test]
    fn svd_vectors_reconstruct() {
        let a = random_matrix(5, 7, 4);
        let d = svd(&a, true).unwrap();
        let (u, v) = (d.u.unwrap(), d.v.unwrap());
        let back = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.sigma.clone())) * v.transpose();
        assert!((back - a).amax() < 1e-13);
    }

    #[test]
    fn svd_rank_deficient_with_vectors() {
        for n in [32, 64, 128] {
            let a = DMatrix::from_element(n, n / 2, 1.0 / n as f64);
            let d = svd(&a, true).unwrap();
            assert!((d.sigma[0] - 1.0 / 2f64.sqrt()).abs() < 1e-14);
            assert!(d.sigma[1..].iter().all(|&s| s < 1e-15));
            let (u, v) = (d.u.unwrap(), d.v.unwrap());
            let back = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.sigma.clone())) * v.transpose();
            assert!((back - &a).amax() < 1e-15);
            let wide = svd(&a.transpose(), true).unwrap();
            assert_eq!(wide.u.unwrap().shape(), (n / 2, n / 2));
        }
    }

    #[test]
    fn svd_relative_accuracy_at_size() {
        let a = random_matrix(3, 192, 160);
        let s = svd(&a, false).unwrap();
        let mut eig: Vec<f64> = SymmetricEigen::new(a.transpose() * &a).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in s.sigma.iter().zip(&eig) {
            assert!((x - y).abs() <= 1e-8 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn schatten_examples() {
        let s = spectrum_of(vec![2.5, 0.0, 0.0]);
        for p in [0.3, 1.0, 2.0, 5.0] {
            assert!((schatten(&s, p).unwrap() - 2.5).abs() < 1e-15);
        }
        let a = random_matrix(31, 32, 32);
        let s = singular_values(&DiscreteOperator::from_matrix(a.clone(), "r")).unwrap();
        assert!((schatten(&s, 2.0).unwrap() - a.norm()).abs() < 1e-12 * a.norm());
        let direct = s.values().iter().map(|v| v.sqrt()).sum::<f64>().powi(2);
        assert!((schatten(&s, 0.5).unwrap() - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn hs_approx_examples() {
        assert_eq!(hs_approx_numbers(&spectrum_of(vec![1.0, 0.0, 0.0])).as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(hs_approx_numbers(&spectrum_of(vec![4.0, 3.0])).as_slice(), &[3.0, 0.0]);
        let s = singular_values(&DiscreteOperator::from_matrix(random_matrix(31, 32, 32), "r")).unwrap();
        let e = hs_approx_numbers(&s);
        for n in 0..32 {
            let direct: f64 = s.values()[n + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((e[n] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_estimate_examples() {
        for seed in 1..=20 {
            let s = singular_values(&DiscreteOperator::from_matrix(random_matrix(seed, 32, 32), "r")).unwrap();
            assert!(check_mu_estimate(&s).unwrap().worst_ratio <= 1.0);
        }
        for m in 1..10 {
            let mut v = vec![1.0; 2 * m + 1];
            v.extend([0.0; 5]);
            let r = check_mu_estimate(&spectrum_of(v)).unwrap();
            assert_eq!(r.worst_ratio, 1.0, "m={m}");
            assert_eq!(r.worst_n, Some(m));
        }
        let r = check_mu_estimate(&spectrum_of(vec![1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.worst_ratio, 0.0);
        assert!(r.degenerate > 0);
        assert!(matches!(check_mu_estimate(&spectrum_of(vec![1.0, 0.5])), Err(Error::SpectrumTooShort(2, 3))));
    }

    #[test]
    fn lpq_examples() {
        assert_eq!(check_lpq_equivalence(&spectrum_of(vec![1.0, 0.0, 0.0]), 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(check_lpq_equivalence(&spectrum_of(vec![0.0; 4]), 1.0, 1.0), Err(Error::ZeroSpectrum)));
        let ratio = |e: u32| {
            let v = (0..1usize << e).map(|n| 1.0 / (n as f64 + 1.0)).collect();
            check_lpq_equivalence(&spectrum_of(v), 1.0, f64::INFINITY).unwrap()
        };
        let r: Vec<f64> = (6..=12).map(ratio).collect();
        for w in r.windows(2) {
            assert!(w[0] > 0.0 && (w[1] / w[0] - 1.0).abs() < 0.2, "{r:?}");
        }
    }

    #[test]
    fn embedding_rank_one() {
        let g = DyadicGrid::unit(6);
        let k = sample_builtin(&KernelSpec::new(KernelFamily::SeparableGaussian), &g, &g).unwrap();
        let k = k.scaled(1.0 / k.l2_norm());
        let f = WaveletFilter::daubechies(3).unwrap();
        let r = embedding_report(&k, &f, 1.0).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-10);
        assert!(r.ratio <= 1.0 + 1e-10);
        let zero = SampledKernel::zeros(g, g, "z");
        assert!(matches!(verify_main_embedding(&[zero], &f, 1.0), Err(Error::ZeroKernel)));
    }

    #[test]
    fn decay_rate_examples() {
        let s = spectrum_of((0..200).map(|n| (n as f64 + 1.0).powi(-2)).collect());
        assert!((decay_rate(&s, 5..150).unwrap() + 2.0).abs() < 1e-10);
        let s = spectrum_of((0..200).map(|n| 3.0 / (n as f64 + 1.0)).collect());
        assert!((decay_rate(&s, 0..200).unwrap() + 1.0).abs() < 1e-10);
        let s = spectrum_of(vec![1.0, 0.5, 0.0, 0.0]);
        assert!(matches!(decay_rate(&s, 0..4), Err(Error::NonpositiveValuesInRange(2))));
        assert!(decay_rate(&s, 0..1).is_err());
        let s = spectrum_of((0..100).map(|n| 1.0 / (n as f64 + 1.0)).collect());
        assert_eq!(middle_decade(&s), 4..32);
    }
}
