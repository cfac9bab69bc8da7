//! Vector-valued wavelet coefficients of kernels, homogeneous Besov
//! semi-quasinorms, greedy n-term approximation and approximation numbers.
//!
//! The kernel is viewed as the map `x -> k(x, .)` into `E = L2` or `L_inf`
//! of the second variable; each coefficient `c_{j,k}` is a vector over the
//! y-grid.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic_wavelet::{forward_dwt, WaveletFilter};
use crate::error::{Error, Result};
use crate::kernel_model::SampledKernel;
use crate::seqspace::{decreasing_rearrangement, ell_p, lorentz_pq, NonnegSeq};

/// Position of a coefficient. Scaling coefficients order before all details,
/// details order by `(level, shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoeffIndex {
    Scaling { shift: u64 },
    Detail { level: u32, shift: u64 },
}

impl CoeffIndex {
    pub fn is_detail(&self) -> bool {
        matches!(self, CoeffIndex::Detail { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueNorm {
    L2,
    Linf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub coarsest_level: u32,
    /// Number of x levels of the analysed grid.
    pub levels: u32,
    pub entries: BTreeMap<CoeffIndex, Vec<f64>>,
    pub filter: WaveletFilter,
    pub x_length: f64,
    pub y_spacing: f64,
}

impl CoefficientField {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: CoeffIndex) -> Option<&[f64]> {
        self.entries.get(&index).map(Vec::as_slice)
    }

    pub fn details(&self) -> impl Iterator<Item = (u32, u64, &[f64])> {
        self.entries.iter().filter_map(|(i, v)| match *i {
            CoeffIndex::Detail { level, shift } => Some((level, shift, v.as_slice())),
            CoeffIndex::Scaling { .. } => None,
        })
    }

    /// `y_spacing * sum v^2` over every entry; equals the squared grid L2
    /// norm of the analysed kernel.
    pub fn energy(&self) -> f64 {
        self.y_spacing * self.entries.values().flat_map(|v| v.iter()).map(|x| x * x).sum::<f64>()
    }

    pub fn norm(&self, index: CoeffIndex, value_norm: ValueNorm) -> Option<f64> {
        self.get(index).map(|v| vector_norm(v, self.y_spacing, value_norm))
    }

    pub fn with_entries(&self, entries: BTreeMap<CoeffIndex, Vec<f64>>) -> Self {
        Self { entries, ..self.clone() }
    }
}

fn vector_norm(v: &[f64], spacing: f64, value_norm: ValueNorm) -> f64 {
    match value_norm {
        ValueNorm::L2 => (spacing * v.iter().map(|x| x * x).sum::<f64>()).sqrt(),
        ValueNorm::Linf => v.iter().fold(0.0, |a, x| a.max(x.abs())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub value_norm: ValueNorm,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64, value_norm: ValueNorm) -> Result<Self> {
        let params = Self { s, p, q, value_norm };
        params.validate()?;
        Ok(params)
    }

    /// `s = 1/p - 1/2`, `q = p`, `E = L2`: the Schatten regime.
    pub fn schatten(p: f64) -> Result<Self> {
        Self::new(1.0 / p - 0.5, p, p, ValueNorm::L2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidBesovParams(format!("p = {} must be positive and finite", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::InvalidBesovParams(format!("q = {} must be positive", self.q)));
        }
        let floor = (1.0 / self.p - 1.0).max(0.0);
        if !(self.s > floor && self.s.is_finite()) {
            return Err(Error::InvalidBesovParams(format!("s = {} must exceed max(1/p - 1, 0) = {floor}", self.s)));
        }
        Ok(())
    }
}

/// Calibrated wavelet analysis of every y-column of `k`.
pub fn analyze_kernel(k: &SampledKernel, filter: &WaveletFilter, coarsest_level: u32) -> Result<CoefficientField> {
    let levels = k.grid_x.levels;
    let h = k.grid_x.spacing();
    let cols = k.cols();
    let pyramids = (0..cols)
        .into_par_iter()
        .map(|m| forward_dwt(&k.column(m), filter, coarsest_level).map(|p| p.calibrated(h)))
        .collect::<Result<Vec<_>>>()?;

    let mut entries = BTreeMap::new();
    for shift in 0..1usize << coarsest_level {
        let v = pyramids.iter().map(|p| p.scaling[shift]).collect();
        entries.insert(CoeffIndex::Scaling { shift: shift as u64 }, v);
    }
    for level in coarsest_level..levels {
        for shift in 0..1usize << level {
            let v = pyramids.iter().map(|p| p.detail(level).expect("level in range")[shift]).collect();
            entries.insert(CoeffIndex::Detail { level, shift: shift as u64 }, v);
        }
    }
    Ok(CoefficientField {
        coarsest_level,
        levels,
        entries,
        filter: filter.clone(),
        x_length: k.grid_x.length(),
        y_spacing: k.grid_y.spacing(),
    })
}

pub fn coefficient_norms(field: &CoefficientField, value_norm: ValueNorm) -> BTreeMap<CoeffIndex, f64> {
    field
        .entries
        .iter()
        .map(|(i, v)| (*i, vector_norm(v, field.y_spacing, value_norm)))
        .collect()
}

/// Semi-quasinorm from detail norms keyed by `(level, shift)`; levels are
/// dilations `2^j / L` of a box of length `x_length`.
pub fn seminorm_from_norms(norms: &BTreeMap<CoeffIndex, f64>, params: &BesovParams, x_length: f64) -> Result<f64> {
    params.validate()?;
    let exponent = params.s + 0.5 - 1.0 / params.p;
    let weight = |level: u32| -> f64 {
        if exponent == 0.0 {
            1.0
        } else {
            (2f64.powi(level as i32) / x_length).powf(exponent)
        }
    };
    let details = norms.iter().filter_map(|(i, &n)| match *i {
        CoeffIndex::Detail { level, .. } => Some((level, n)),
        CoeffIndex::Scaling { .. } => None,
    });
    if params.q == params.p {
        // Outer and inner exponents agree: a single weighted l_p sum.
        let weighted = details.map(|(level, n)| weight(level) * n);
        return ell_p(&NonnegSeq::from_abs(weighted), params.p);
    }
    let mut per_level: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (level, n) in details {
        per_level.entry(level).or_default().push(n);
    }
    let mut outer = Vec::with_capacity(per_level.len());
    for (level, ns) in per_level {
        outer.push(weight(level) * ell_p(&NonnegSeq::from_abs(ns), params.p)?);
    }
    ell_p(&NonnegSeq::from_abs(outer), params.q)
}

/// `|| ( (2^j/L)^{s + 1/2 - 1/p} || (||c_{j,k}||_E)_k ||_{l_p} )_j ||_{l_q}`
/// over the detail levels; scaling coefficients are not included.
pub fn besov_seminorm(field: &CoefficientField, params: &BesovParams) -> Result<f64> {
    params.validate()?;
    seminorm_from_norms(&coefficient_norms(field, params.value_norm), params, field.x_length)
}

/// Indices ordered by decreasing norm, ties by index.
fn ranked(field: &CoefficientField, value_norm: ValueNorm) -> Vec<(CoeffIndex, f64)> {
    let mut v: Vec<(CoeffIndex, f64)> = coefficient_norms(field, value_norm).into_iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Keeps the `n` largest entries (scaling entries included) and zeroes the
/// rest.
pub fn greedy_n_term(field: &CoefficientField, n: usize, value_norm: ValueNorm) -> CoefficientField {
    let keep: std::collections::BTreeSet<CoeffIndex> = ranked(field, value_norm).into_iter().take(n).map(|(i, _)| i).collect();
    let entries = field
        .entries
        .iter()
        .map(|(i, v)| {
            let v = if keep.contains(i) { v.clone() } else { vec![0.0; v.len()] };
            (*i, v)
        })
        .collect();
    field.with_entries(entries)
}

/// L2 distance between two fields over the same index set.
pub fn field_distance(a: &CoefficientField, b: &CoefficientField) -> f64 {
    let sum: f64 = a
        .entries
        .iter()
        .map(|(i, va)| {
            let vb = b.entries.get(i).map(Vec::as_slice).unwrap_or(&[]);
            va.iter()
                .enumerate()
                .map(|(m, x)| {
                    let d = x - vb.get(m).copied().unwrap_or(0.0);
                    d * d
                })
                .sum::<f64>()
        })
        .sum();
    (a.y_spacing * sum).sqrt()
}

fn tails(b: &NonnegSeq) -> Vec<f64> {
    let s = b.as_slice();
    let mut tail = vec![0.0; s.len() + 1];
    for k in (0..s.len()).rev() {
        tail[k] = tail[k + 1] + s[k] * s[k];
    }
    tail
}

/// `E_n = (sum_{k >= n+1} b_k^2)^{1/2}` for the decreasingly rearranged
/// (zero-based) norms `b`, `n = 0, ..., len - 1`.
pub fn approx_numbers_of(b: &NonnegSeq) -> NonnegSeq {
    let b = decreasing_rearrangement(b);
    let tail = tails(&b);
    NonnegSeq::from_abs((0..b.len()).map(|n| tail[n + 1].sqrt()))
}

pub fn approx_numbers(field: &CoefficientField) -> NonnegSeq {
    approx_numbers_of(&NonnegSeq::from_abs(coefficient_norms(field, ValueNorm::L2).into_values()))
}

/// Best n-term errors `(sum_{k >= n} b_k^2)^{1/2}` for `n = 0, ..., len`;
/// the first entry is the full norm.
pub fn best_n_term_errors_of(b: &NonnegSeq) -> NonnegSeq {
    let b = decreasing_rearrangement(b);
    NonnegSeq::from_abs(tails(&b).into_iter().map(f64::sqrt))
}

pub fn best_n_term_errors(field: &CoefficientField) -> NonnegSeq {
    best_n_term_errors_of(&NonnegSeq::from_abs(coefficient_norms(field, ValueNorm::L2).into_values()))
}

/// `||E||_{l_{1/alpha, q}}`.
pub fn approx_space_quasinorm(e: &NonnegSeq, alpha: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidExponent { name: "alpha", value: alpha });
    }
    lorentz_pq(e, 1.0 / alpha, q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearReport {
    pub label: String,
    pub p: f64,
    pub alpha: f64,
    /// `||(E_n)||_{l_{1/alpha, p}}` with `E_0 = ||k||_2`.
    pub a_quasinorm: f64,
    pub l2_norm: f64,
    pub seminorm: f64,
    /// `||(b_n)||_{l_p}` of all coefficient norms.
    pub coefficient_lp: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_coefficient: f64,
}

/// Both sides of `||k||_{A^alpha_p} ~ ||k||_2 + |k|_{B^alpha_{p,p}}` with
/// `alpha = 1/p - 1/2`, plus the intermediate `l_p` norm of the coefficients.
pub fn verify_nonlinear_equivalence(k: &SampledKernel, filter: &WaveletFilter, p: f64) -> Result<NonlinearReport> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidBesovParams(format!("p = {p} must lie in (0, 2)")));
    }
    if k.is_zero() {
        return Err(Error::ZeroKernel);
    }
    let alpha = 1.0 / p - 0.5;
    let field = analyze_kernel(k, filter, 0)?;
    let norms = NonnegSeq::from_abs(coefficient_norms(&field, ValueNorm::L2).into_values());
    let a_quasinorm = approx_space_quasinorm(&best_n_term_errors_of(&norms), alpha, p)?;
    let l2_norm = k.l2_norm();
    let seminorm = besov_seminorm(&field, &BesovParams::schatten(p)?)?;
    let coefficient_lp = ell_p(&norms, p)?;
    let rhs = l2_norm + seminorm;
    Ok(NonlinearReport {
        label: k.label.clone(),
        p,
        alpha,
        a_quasinorm,
        l2_norm,
        seminorm,
        coefficient_lp,
        rhs,
        ratio: a_quasinorm / rhs,
        ratio_coefficient: a_quasinorm / coefficient_lp,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dyadic_wavelet::DyadicGrid;
    use crate::kernel_model::{synthesize_planted, PlantedSpec};

    fn field_from(norms: &[(CoeffIndex, Vec<f64>)], spacing: f64) -> CoefficientField {
        CoefficientField {
            coarsest_level: 0,
            levels: 8,
            entries: norms.iter().cloned().collect(),
            filter: WaveletFilter::haar(),
            x_length: 1.0,
            y_spacing: spacing,
        }
    }

    fn random_field(seed: u64, count: usize, len: usize) -> CoefficientField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<(CoeffIndex, Vec<f64>)> = (0..count)
            .map(|i| {
                let level = (usize::BITS - (i + 1).leading_zeros() - 1) as u32;
                let idx = CoeffIndex::Detail { level, shift: (i + 1 - (1 << level)) as u64 };
                (idx, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())
            })
            .collect();
        field_from(&entries, 1.0 / len as f64)
    }

    #[test]
    fn constant_in_x_has_no_details() {
        let g = DyadicGrid::unit(6);
        let k = SampledKernel::from_fn(g, g, "c", |_, y| (3.0 * y).cos()).unwrap();
        let field = analyze_kernel(&k, &WaveletFilter::haar(), 0).unwrap();
        for (_, _, v) in field.details() {
            assert!(v.iter().all(|x| x.abs() < 1e-12));
        }
        assert!((field.energy() - k.l2_norm().powi(2)).abs() < 1e-8 * field.energy());
    }

    #[test]
    fn rank_one_separability() {
        let g = DyadicGrid::unit(7);
        let f = WaveletFilter::daubechies(3).unwrap();
        let xi = |x: f64| (x * 7.0).sin() * (-x).exp();
        let eta = |y: f64| 1.0 + y * y;
        let k = SampledKernel::from_fn(g, g, "r1", |x, y| xi(x) * eta(y)).unwrap();
        let field = analyze_kernel(&k, &f, 2).unwrap();
        let xs: Vec<f64> = g.points().iter().map(|&x| xi(x)).collect();
        let p = forward_dwt(&xs, &f, 2).unwrap().calibrated(g.spacing());
        for (level, shift, v) in field.details() {
            let c = p.detail(level).unwrap()[shift as usize];
            for (m, y) in g.points().iter().enumerate() {
                assert!((v[m] - c * eta(*y)).abs() < 1e-13);
            }
        }
        assert_eq!(field.details().filter(|(l, _, _)| *l == 5).count(), 32);
    }

    #[test]
    fn norm_examples() {
        let mut impulse = vec![0.0; 16];
        impulse[3] = 1.0;
        let f = field_from(&[(CoeffIndex::Detail { level: 0, shift: 0 }, impulse)], 0.37);
        assert_eq!(coefficient_norms(&f, ValueNorm::Linf)[&CoeffIndex::Detail { level: 0, shift: 0 }], 1.0);
        let f = field_from(&[(CoeffIndex::Detail { level: 0, shift: 0 }, vec![1.0; 64])], 1.0 / 64.0);
        assert!((coefficient_norms(&f, ValueNorm::L2)[&CoeffIndex::Detail { level: 0, shift: 0 }] - 1.0).abs() < 1e-12);

        let f = random_field(21, 20, 32);
        let norms = coefficient_norms(&f, ValueNorm::L2);
        for (i, v) in &f.entries {
            let direct = (v.iter().map(|x| x * x / 32.0).sum::<f64>()).sqrt();
            assert!((norms[i] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn seminorm_examples() {
        let f = field_from(&[(CoeffIndex::Detail { level: 0, shift: 0 }, vec![1.0; 4])], 0.25);
        for (s, p, q) in [(0.5, 1.0, 1.0), (2.0, 0.5, 3.0), (0.1, 4.0, f64::INFINITY)] {
            let params = BesovParams::new(s, p, q, ValueNorm::L2).unwrap();
            assert!((besov_seminorm(&f, &params).unwrap() - 1.0).abs() < 1e-15);
        }
        let f = random_field(4, 40, 8);
        for p in [0.5, 2.0 / 3.0, 1.0, 1.5] {
            let params = BesovParams::schatten(p).unwrap();
            let norms: Vec<f64> = coefficient_norms(&f, ValueNorm::L2).into_values().collect();
            assert_eq!(besov_seminorm(&f, &params).unwrap(), ell_p(&NonnegSeq::from_abs(norms), p).unwrap());
        }
        assert!(matches!(BesovParams::new(0.5, 0.5, 1.0, ValueNorm::L2), Err(Error::InvalidBesovParams(_))));
        assert!(BesovParams::new(0.0, 2.0, 1.0, ValueNorm::L2).is_err());
    }

    #[test]
    fn seminorm_weights_by_level() {
        let f = field_from(
            &[
                (CoeffIndex::Scaling { shift: 0 }, vec![5.0]),
                (CoeffIndex::Detail { level: 0, shift: 0 }, vec![1.0]),
                (CoeffIndex::Detail { level: 2, shift: 1 }, vec![1.0]),
                (CoeffIndex::Detail { level: 2, shift: 3 }, vec![1.0]),
            ],
            1.0,
        );
        let params = BesovParams::new(1.0, 1.0, 2.0, ValueNorm::Linf).unwrap();
        let expected = (1.0 + (4f64.powf(0.5) * 2.0).powi(2)).sqrt();
        assert!((besov_seminorm(&f, &params).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn greedy_edges() {
        let f = random_field(1, 12, 4);
        let empty = greedy_n_term(&f, 0, ValueNorm::L2);
        assert_eq!(empty.energy(), 0.0);
        assert!((field_distance(&f, &empty) - f.energy().sqrt()).abs() < 1e-14);
        assert_eq!(greedy_n_term(&f, 12, ValueNorm::L2), f);
        assert_eq!(greedy_n_term(&f, 100, ValueNorm::L2), f);
    }

    #[test]
    fn greedy_tie_break_is_lexicographic() {
        let a = CoeffIndex::Detail { level: 1, shift: 1 };
        let b = CoeffIndex::Detail { level: 1, shift: 0 };
        let f = field_from(&[(a, vec![1.0]), (b, vec![-1.0])], 1.0);
        let g = greedy_n_term(&f, 1, ValueNorm::L2);
        assert_eq!(g.get(b), Some(&[-1.0][..]));
        assert_eq!(g.get(a), Some(&[0.0][..]));
    }

    #[test]
    fn greedy_matches_exhaustive_search() {
        for seed in 0..5 {
            let f = random_field(seed, 12, 3);
            let indices: Vec<CoeffIndex> = f.entries.keys().copied().collect();
            let greedy = field_distance(&f, &greedy_n_term(&f, 4, ValueNorm::L2));
            let mut best = f64::INFINITY;
            for mask in 0u32..1 << 12 {
                if mask.count_ones() != 4 {
                    continue;
                }
                let entries = indices
                    .iter()
                    .enumerate()
                    .map(|(b, i)| (*i, if mask >> b & 1 == 1 { f.entries[i].clone() } else { vec![0.0; 3] }))
                    .collect();
                best = best.min(field_distance(&f, &f.with_entries(entries)));
            }
            assert!((greedy - best).abs() < 1e-12, "seed {seed}: {greedy} vs {best}");
        }
    }

    #[test]
    fn approx_number_examples() {
        let e = approx_numbers_of(&NonnegSeq::new(vec![1.0, 0.0, 0.0]).unwrap());
        assert_eq!(e.as_slice(), &[0.0, 0.0, 0.0]);
        let e = approx_numbers_of(&NonnegSeq::new(vec![3.0, 4.0]).unwrap());
        assert_eq!(e.as_slice(), &[3.0, 0.0]);
        let e = best_n_term_errors_of(&NonnegSeq::new(vec![3.0, 4.0]).unwrap());
        assert_eq!(e.as_slice(), &[5.0, 3.0, 0.0]);

        let f = random_field(17, 64, 5);
        let e = approx_numbers(&f);
        let mut b: Vec<f64> = coefficient_norms(&f, ValueNorm::L2).into_values().collect();
        b.sort_by(|x, y| y.total_cmp(x));
        for n in 0..64 {
            let direct = b[n + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((e[n] - direct).abs() < 1e-12);
        }
        assert!(e.is_nonincreasing());
        assert_eq!(e[63], 0.0);
    }

    #[test]
    fn approx_space_examples() {
        let e = NonnegSeq::new(vec![1.0, 0.0, 0.0]).unwrap();
        for (a, q) in [(0.5, 1.0), (2.0, f64::INFINITY), (1.3, 0.4)] {
            assert_eq!(approx_space_quasinorm(&e, a, q).unwrap(), 1.0);
        }
        let e = approx_numbers(&random_field(17, 64, 5));
        let p = 2.0 / 3.0;
        assert_eq!(approx_space_quasinorm(&e, 1.0 / p, p).unwrap(), ell_p(&e, p).unwrap());
        assert_eq!(approx_space_quasinorm(&e, 0.8, 2.0).unwrap(), lorentz_pq(&e, 1.25, 2.0).unwrap());
    }

    #[test]
    fn rearrangement_bound_on_approx_numbers() {
        let f = random_field(8, 64, 5);
        let mut b: Vec<f64> = coefficient_norms(&f, ValueNorm::L2).into_values().collect();
        b.sort_by(|x, y| y.total_cmp(x));
        let e = approx_numbers(&f);
        for n in 1..32 {
            assert!((2.0 * n as f64).sqrt() * b[2 * n] <= std::f64::consts::SQRT_2 * e[n - 1]);
        }
    }

    #[test]
    fn planted_round_trip() {
        let g = DyadicGrid::unit(8);
        let f = WaveletFilter::daubechies(3).unwrap();
        let planted = synthesize_planted(&PlantedSpec::new(1.0, 1.0, f.clone(), 13), &g, &g).unwrap();
        let field = analyze_kernel(&planted.kernel, &f, 0).unwrap();
        let norms = coefficient_norms(&field, ValueNorm::L2);
        for c in &planted.coefficients {
            let got = norms[&CoeffIndex::Detail { level: c.level, shift: c.shift }];
            assert!((got - c.norm).abs() <= 0.02 * c.norm);
        }
        let params = BesovParams::new(1.0, 1.0, 1.0, ValueNorm::L2).unwrap();
        let s = besov_seminorm(&field, &params).unwrap();
        assert!((s / planted.ground_truth - 1.0).abs() < 0.02, "{s} vs {}", planted.ground_truth);
    }

    #[test]
    fn nonlinear_single_coefficient() {
        let g = DyadicGrid::unit(6);
        let f = WaveletFilter::haar();
        let coeff = crate::kernel_model::PlantedCoefficient { level: 2, shift: 1, values: vec![1.0; 64], norm: 1.0 };
        let k = crate::kernel_model::synthesize_from_field(&[coeff], &f, &g, &g, "one").unwrap();
        let r = verify_nonlinear_equivalence(&k, &f, 1.0).unwrap();
        assert!((r.a_quasinorm - 1.0).abs() < 1e-12);
        assert!((r.coefficient_lp - 1.0).abs() < 1e-12);
        assert!((r.ratio_coefficient - 1.0).abs() < 1e-12);
        assert!((r.l2_norm - 1.0).abs() < 1e-12 && (r.seminorm - 1.0).abs() < 1e-12);
        assert!(matches!(verify_nonlinear_equivalence(&k, &f, 2.0), Err(Error::InvalidBesovParams(_))));
        let zero = SampledKernel::zeros(g, g, "z");
        assert!(matches!(verify_nonlinear_equivalence(&zero, &f, 1.0), Err(Error::ZeroKernel)));
    }
}
