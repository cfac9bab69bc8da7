//! Estimates of the Schur multiplier quasinorm `||k||_{M_p}`.
//!
//! For a symbol sampled on a grid the multiplier acts on discretised kernels
//! entrywise, and with `u = xi sqrt(hx)`, `v = eta sqrt(hy)` the operator
//! `Op(k (xi (x) eta))` becomes `D_u K D_v` with Euclidean unit vectors
//! `u`, `v`. Lower bounds maximise `||D_u K D_v||_p` over such pairs; upper
//! bounds for `p <= 1` come from strip partitions and wavelet slices, each
//! combined with the `p`-triangle inequality.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov_analysis::{analyze_kernel, besov_seminorm, BesovParams, CoeffIndex, ValueNorm};
use crate::dyadic_wavelet::{inverse_dwt, WaveletFilter, WaveletPyramid};
use crate::error::{Error, Result};
use crate::kernel_model::SampledKernel;
use crate::rng;
use crate::seqspace::{ell_p, NonnegSeq};
use crate::spectral::svd;

/// Largest side accepted by [`matrix_mp_oracle`].
pub const ORACLE_MAX_SIZE: usize = 8;

/// `p_flat = 2p / (2 - p)`, so that `1/p_flat = 1/p - 1/2`.
pub fn p_flat(p: f64) -> f64 {
    2.0 * p / (2.0 - p)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchurSymbol {
    Sampled(SampledKernel),
    Matrix(DMatrix<f64>),
}

impl SchurSymbol {
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            SchurSymbol::Sampled(k) => DMatrix::from_row_slice(k.rows(), k.cols(), &k.values),
            SchurSymbol::Matrix(m) => m.clone(),
        }
    }

    pub fn bounded_norm(&self) -> f64 {
        match self {
            SchurSymbol::Sampled(k) => k.sup_norm(),
            SchurSymbol::Matrix(m) => m.amax(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SchurSymbol::Sampled(k) => k.label.clone(),
            SchurSymbol::Matrix(m) => format!("matrix{}x{}", m.nrows(), m.ncols()),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            SchurSymbol::Sampled(k) => SchurSymbol::Sampled(k.scaled(c)),
            SchurSymbol::Matrix(m) => SchurSymbol::Matrix(m * c),
        }
    }
}

/// Operand of a multiplier: a kernel or a matrix of matching shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Kernel(SampledKernel),
    Matrix(DMatrix<f64>),
}

/// Entrywise product `k phi`.
pub fn apply_multiplier(k: &SchurSymbol, phi: &Operand) -> Result<Operand> {
    match (k, phi) {
        (SchurSymbol::Sampled(a), Operand::Kernel(b)) => {
            if a.grid_x != b.grid_x || a.grid_y != b.grid_y {
                return Err(Error::ShapeMismatch("symbol and kernel live on different grids".into()));
            }
            let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
            Ok(Operand::Kernel(SampledKernel::new(b.grid_x, b.grid_y, values, b.label.clone())?))
        }
        (SchurSymbol::Matrix(a), Operand::Matrix(b)) => {
            if a.shape() != b.shape() {
                return Err(Error::ShapeMismatch(format!("{:?} symbol on a {:?} matrix", a.shape(), b.shape())));
            }
            Ok(Operand::Matrix(a.component_mul(b)))
        }
        _ => Err(Error::ShapeMismatch("symbol and operand kinds differ".into())),
    }
}

fn check_p(p: f64, max: f64) -> Result<()> {
    if p > 0.0 && p <= max {
        Ok(())
    } else {
        Err(Error::InvalidExponent { name: "p", value: p })
    }
}

/// `sum sigma^p` of `D_u K D_v`.
fn power_sum(k: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>, p: f64) -> Result<f64> {
    let m = DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| u[i] * k[(i, j)] * v[j]);
    Ok(significant(&svd(&m, false)?.sigma).map(|s| s.powf(p)).sum())
}

/// Singular values above roundoff relative to the largest; the rest would
/// dominate `sum sigma^p` for small `p` on rank-deficient products.
fn significant(sigma: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let top = sigma.first().copied().unwrap_or(0.0);
    let tol = 1e-13 * top * sigma.len().max(1) as f64;
    sigma.iter().copied().filter(move |&s| s > tol)
}

/// Gradients of `sum sigma^p` with respect to `u` and `v`.
fn gradients(k: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>, p: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    let m = DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| u[i] * k[(i, j)] * v[j]);
    let d = svd(&m, true)?;
    let (su, sv) = (d.u.expect("vectors requested"), d.v.expect("vectors requested"));
    let mut g = DMatrix::zeros(k.nrows(), k.ncols());
    for (r, s) in significant(&d.sigma).enumerate() {
        g += (su.column(r) * sv.column(r).transpose()) * (p * s.powf(p - 1.0));
    }
    let gk = g.component_mul(k);
    Ok((&gk * v, gk.transpose() * u))
}

fn normalized(mut x: DVector<f64>) -> Option<DVector<f64>> {
    let n = x.norm();
    if n > 0.0 && n.is_finite() {
        x /= n;
        Some(x)
    } else {
        None
    }
}

/// One projected-gradient step on the unit sphere with backtracking;
/// returns the improved point and value, or `None` if no step improves.
fn sphere_step(
    x: &DVector<f64>,
    grad: &DVector<f64>,
    value: f64,
    step: &mut f64,
    eval: impl Fn(&DVector<f64>) -> Result<f64>,
) -> Result<Option<(DVector<f64>, f64)>> {
    let tangent = grad - x * grad.dot(x);
    let Some(dir) = normalized(tangent) else { return Ok(None) };
    let mut t = *step;
    for _ in 0..30 {
        if let Some(cand) = normalized(x + &dir * t) {
            let val = eval(&cand)?;
            if val > value {
                *step = (2.0 * t).min(1.0);
                return Ok(Some((cand, val)));
            }
        }
        t *= 0.5;
    }
    *step = t.max(1e-6);
    Ok(None)
}

/// Alternating ascent of `sum sigma^p(D_u K D_v)` from `(u, v)`; only
/// improving steps are accepted.
fn ascend(k: &DMatrix<f64>, p: f64, mut u: DVector<f64>, mut v: DVector<f64>, steps: usize) -> Result<(f64, DVector<f64>, DVector<f64>)> {
    let mut value = power_sum(k, &u, &v, p)?;
    let (mut tu, mut tv) = (0.5, 0.5);
    for _ in 0..steps {
        let mut moved = false;
        let (gu, _) = gradients(k, &u, &v, p)?;
        if let Some((nu, val)) = sphere_step(&u, &gu, value, &mut tu, |c| power_sum(k, c, &v, p))? {
            u = nu;
            value = val;
            moved = true;
        }
        let (_, gv) = gradients(k, &u, &v, p)?;
        if let Some((nv, val)) = sphere_step(&v, &gv, value, &mut tv, |c| power_sum(k, &u, c, p))? {
            v = nv;
            value = val;
            moved = true;
        }
        if !moved && tu <= 1e-6 && tv <= 1e-6 {
            break;
        }
    }
    Ok((value, u, v))
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let x = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        if let Some(x) = normalized(x) {
            return x;
        }
    }
}

/// Starting pairs that need no randomness: the entry of largest modulus,
/// the flat pair, and the top singular pair of `|K|`.
fn deterministic_starts(k: &DMatrix<f64>) -> Result<Vec<(DVector<f64>, DVector<f64>)>> {
    let (m, n) = k.shape();
    let mut starts = Vec::new();
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for j in 0..n {
        for i in 0..m {
            if k[(i, j)].abs() > best {
                best = k[(i, j)].abs();
                bi = i;
                bj = j;
            }
        }
    }
    let mut ei = DVector::zeros(m);
    ei[bi] = 1.0;
    let mut ej = DVector::zeros(n);
    ej[bj] = 1.0;
    starts.push((ei, ej));
    starts.push((DVector::from_element(m, 1.0 / (m as f64).sqrt()), DVector::from_element(n, 1.0 / (n as f64).sqrt())));
    let d = svd(&k.abs(), true)?;
    if let (Some(u), Some(v)) = (d.u, d.v) {
        if let (Some(a), Some(b)) = (normalized(u.column(0).abs()), normalized(v.column(0).abs())) {
            starts.push((a, b));
        }
    }
    Ok(starts)
}

/// Settings of the rank-one search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Random unit pairs evaluated without ascent.
    pub samples: usize,
    /// Alternating ascent steps per start.
    pub ascent_steps: usize,
    /// The first `min(samples, restarts)` samples are also ascended.
    pub restarts: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { samples: 200, ascent_steps: 50, restarts: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    /// Maximising `xi`, `eta` in continuum units (unit L2 norm) for sampled
    /// symbols, Euclidean unit vectors for matrix symbols.
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// True for `p > 1`, where rank-one pairs need not attain the norm.
    pub heuristic: bool,
}

fn search_matrix(k: &DMatrix<f64>, p: f64, budget: &SearchBudget, seed: u64, task: &str) -> Result<(f64, DVector<f64>, DVector<f64>)> {
    let (m, n) = k.shape();
    let sample = |i: usize| {
        let mut r = rng::indexed_rng(seed, task, i as u64);
        let u = random_unit(&mut r, m);
        let v = random_unit(&mut r, n);
        (u, v)
    };
    let mut starts = deterministic_starts(k)?;
    starts.extend((0..budget.samples.min(budget.restarts)).map(sample));

    let ascended = starts
        .into_par_iter()
        .map(|(u, v)| ascend(k, p, u, v, budget.ascent_steps))
        .collect::<Result<Vec<_>>>()?;
    let plain = (0..budget.samples)
        .into_par_iter()
        .map(|i| {
            let (u, v) = sample(i);
            power_sum(k, &u, &v, p).map(|val| (val, u, v))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for cand in ascended.into_iter().chain(plain) {
        if best.as_ref().is_none_or(|b| cand.0 > b.0) {
            best = Some(cand);
        }
    }
    let (sum, u, v) = best.expect("at least one start");
    Ok((sum.powf(1.0 / p), u, v))
}

/// `max ||Op(k (xi (x) eta))||_p` over sampled and ascended unit pairs.
/// Deterministic in `seed`; nondecreasing in the number of samples and
/// ascent steps.
pub fn rank_one_lower_bound(k: &SchurSymbol, p: f64, budget: &SearchBudget, seed: u64) -> Result<LowerBound> {
    check_p(p, 2.0)?;
    let km = k.matrix();
    if km.is_empty() {
        return Ok(LowerBound { value: 0.0, xi: Vec::new(), eta: Vec::new(), heuristic: p > 1.0 });
    }
    let (value, u, v) = search_matrix(&km, p, budget, seed, "schur-rank-one")?;
    let (sx, sy) = match k {
        SchurSymbol::Sampled(s) => (1.0 / s.grid_x.spacing().sqrt(), 1.0 / s.grid_y.spacing().sqrt()),
        SchurSymbol::Matrix(_) => (1.0, 1.0),
    };
    Ok(LowerBound {
        value,
        xi: u.iter().map(|x| x * sx).collect(),
        eta: v.iter().map(|x| x * sy).collect(),
        heuristic: p > 1.0,
    })
}

/// `||(v_j)||_{l_{p_flat}}`: the partition estimate from per-strip values.
pub fn aggregate_strips(values: &[f64], p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    ell_p(&NonnegSeq::from_abs(values.iter().copied()), p_flat(p))
}

/// Rigorous `M_p` bound (`p <= 1`) of a matrix symbol through its singular
/// value decomposition `K = sum s_r a_r b_r^T`: each rank-one symbol
/// `a(t) b(s)` has `M_p` norm at most `||a||_inf ||b||_inf`.
pub fn factorisation_bound(k: &DMatrix<f64>, p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    if k.is_empty() || k.amax() == 0.0 {
        return Ok(0.0);
    }
    let d = svd(k, true)?;
    let (u, v) = (d.u.expect("vectors requested"), d.v.expect("vectors requested"));
    let terms = d.sigma.iter().enumerate().map(|(r, s)| s * u.column(r).amax() * v.column(r).amax());
    ell_p(&NonnegSeq::from_abs(terms), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripMethod {
    Empty,
    /// Numerically rank one: `||psi||_inf ||m||_inf`.
    ProductForm,
    Factorisation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripBound {
    pub start: f64,
    pub end: f64,
    pub rows: usize,
    pub value: f64,
    pub method: StripMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionBound {
    pub value: f64,
    pub strips: Vec<StripBound>,
}

fn strip_bound(rows: &DMatrix<f64>, p: f64) -> Result<(f64, StripMethod)> {
    if rows.is_empty() || rows.amax() == 0.0 {
        return Ok((0.0, StripMethod::Empty));
    }
    let sigma = svd(rows, false)?.sigma;
    if sigma.get(1).copied().unwrap_or(0.0) <= 1e-12 * sigma[0] {
        // psi(t) m(s): ||psi||_inf ||m||_inf is the largest entry.
        Ok((rows.amax(), StripMethod::ProductForm))
    } else {
        Ok((factorisation_bound(rows, p)?, StripMethod::Factorisation))
    }
}

fn partition_rows(k: &SchurSymbol, breakpoints: &[f64]) -> Result<Vec<(f64, f64, Vec<usize>)>> {
    if breakpoints.len() < 2 {
        return Err(Error::EmptyPartition);
    }
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidPartition("breakpoints must be strictly increasing".into()));
    }
    let points: Vec<f64> = match k {
        SchurSymbol::Sampled(s) => s.grid_x.points(),
        SchurSymbol::Matrix(m) => (0..m.nrows()).map(|i| i as f64).collect(),
    };
    let (first, last) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
    if let Some(x) = points.iter().find(|&&x| x < first || x >= last) {
        return Err(Error::InvalidPartition(format!("point {x} lies outside [{first}, {last})")));
    }
    Ok(breakpoints
        .windows(2)
        .map(|w| {
            let rows = points.iter().enumerate().filter(|(_, &x)| x >= w[0] && x < w[1]).map(|(i, _)| i).collect();
            (w[0], w[1], rows)
        })
        .collect())
}

/// `|| (||k chi_{I_j}(t)||_{M_p})_j ||_{l_{p_flat}}` with rigorous per-strip
/// bounds. For matrix symbols the row index plays the role of `t`.
pub fn partition_upper_bound(k: &SchurSymbol, breakpoints: &[f64], p: f64) -> Result<PartitionBound> {
    check_p(p, 1.0)?;
    let km = k.matrix();
    let mut strips = Vec::new();
    for (start, end, rows) in partition_rows(k, breakpoints)? {
        let sub = DMatrix::from_fn(rows.len(), km.ncols(), |r, c| km[(rows[r], c)]);
        let (value, method) = strip_bound(&sub, p)?;
        strips.push(StripBound { start, end, rows: rows.len(), value, method });
    }
    let values: Vec<f64> = strips.iter().map(|s| s.value).collect();
    Ok(PartitionBound { value: aggregate_strips(&values, p)?, strips })
}

/// Breakpoints of `2^e` equal strips over the row domain of the symbol.
pub fn dyadic_breakpoints(k: &SchurSymbol, e: u32) -> Vec<f64> {
    let (a, b) = match k {
        SchurSymbol::Sampled(s) => (s.grid_x.start, s.grid_x.end),
        SchurSymbol::Matrix(m) => (0.0, m.nrows() as f64),
    };
    let n = 1usize << e;
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Wavelet slices `k_{j,l}(s) = <phi_{j,l}, k(., s)>` per level, together
/// with the sampled basis functions, so that
/// `k(t, s) = sum_l phi_{0,l}(t) k_{0,l}(s) + sum_{j,l} phi_{j,l}(t) k_{j,l}(s)`
/// on the grid (the first sum runs over the scaling part).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSlices {
    pub filter: WaveletFilter,
    pub levels: u32,
    pub x_spacing: f64,
    /// Scaling slice `k_{0,0}` and the sampled scaling function.
    pub scaling: Vec<f64>,
    pub scaling_basis: Vec<f64>,
    /// `slices[j][l]` is `k_{j,l}` on the y-grid.
    pub slices: Vec<Vec<Vec<f64>>>,
    /// Sampled `phi_{j,0}`; other translates are cyclic shifts by `l 2^{J-j}`.
    pub basis: Vec<Vec<f64>>,
}

impl WaveletSlices {
    pub fn basis_function(&self, level: u32, shift: usize) -> Vec<f64> {
        let b = &self.basis[level as usize];
        let n = b.len();
        let step = n >> level;
        (0..n).map(|i| b[(i + n - (shift * step) % n) % n]).collect()
    }

    /// Grid samples of `sum` over all slices; equals the analysed kernel.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.scaling_basis.len();
        let cols = self.scaling.len();
        let mut out = vec![0.0; n * cols];
        let mut add = |phi: &[f64], slice: &[f64]| {
            for (i, &f) in phi.iter().enumerate() {
                if f != 0.0 {
                    for (m, &s) in slice.iter().enumerate() {
                        out[i * cols + m] += f * s;
                    }
                }
            }
        };
        add(&self.scaling_basis, &self.scaling);
        for (j, level) in self.slices.iter().enumerate() {
            for (l, slice) in level.iter().enumerate() {
                add(&self.basis_function(j as u32, l), slice);
            }
        }
        out
    }
}

fn unit_function(filter: &WaveletFilter, levels: u32, spacing: f64, level: Option<u32>) -> Result<Vec<f64>> {
    let mut pyr = WaveletPyramid::zeros(0, levels);
    match level {
        None => pyr.scaling[0] = 1.0,
        Some(j) => pyr.detail_mut(j).expect("level in range")[0] = 1.0,
    }
    let scale = 1.0 / spacing.sqrt();
    Ok(inverse_dwt(&pyr, filter)?.into_iter().map(|v| v * scale).collect())
}

pub fn wavelet_slices(k: &SampledKernel, filter: &WaveletFilter) -> Result<WaveletSlices> {
    let field = analyze_kernel(k, filter, 0)?;
    let levels = k.grid_x.levels;
    let h = k.grid_x.spacing();
    let scaling = field.get(CoeffIndex::Scaling { shift: 0 }).expect("coarsest level 0").to_vec();
    let mut slices = vec![Vec::new(); levels as usize];
    for (level, _, v) in field.details() {
        slices[level as usize].push(v.to_vec());
    }
    let basis = (0..levels).map(|j| unit_function(filter, levels, h, Some(j))).collect::<Result<Vec<_>>>()?;
    Ok(WaveletSlices {
        filter: filter.clone(),
        levels,
        x_spacing: h,
        scaling_basis: unit_function(filter, levels, h, None)?,
        scaling,
        slices,
        basis,
    })
}

/// Number of congruence classes of translates at `level` whose members
/// have disjoint supports on the periodic grid.
pub fn class_count(filter: &WaveletFilter, level: u32) -> usize {
    let width = filter.support_length().max(1).next_power_of_two();
    width.min(1usize << level)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceBound {
    pub value: f64,
    pub scaling_term: f64,
    /// `(level, bound)` for every detail level.
    pub level_terms: Vec<(u32, f64)>,
}

/// Rigorous bound (`p <= 1`) from the wavelet slices: level `j` contributes
/// `sqrt(N_c) max_l ||phi_{j,l}||_inf ||(||k_{j,l}||_inf)_l||_{l_{p_flat}}`,
/// the scaling part `||phi_{0,0}||_inf ||k_{0,0}||_inf`, and the terms are
/// combined by the `p`-triangle inequality.
pub fn wavelet_slice_bound(k: &SampledKernel, filter: &WaveletFilter, p: f64) -> Result<SliceBound> {
    check_p(p, 1.0)?;
    slice_bound_of(&wavelet_slices(k, filter)?, p)
}

fn slice_bound_of(ws: &WaveletSlices, p: f64) -> Result<SliceBound> {
    let pf = p_flat(p);
    let scaling_term = sup(&ws.scaling_basis) * sup(&ws.scaling);
    let mut level_terms = Vec::with_capacity(ws.slices.len());
    for (j, level) in ws.slices.iter().enumerate() {
        let norms = NonnegSeq::from_abs(level.iter().map(|s| sup(s)));
        let classes = class_count(&ws.filter, j as u32) as f64;
        let term = classes.sqrt() * sup(&ws.basis[j]) * ell_p(&norms, pf)?;
        level_terms.push((j as u32, term));
    }
    let all = std::iter::once(scaling_term).chain(level_terms.iter().map(|t| t.1));
    Ok(SliceBound { value: ell_p(&NonnegSeq::from_abs(all), p)?, scaling_term, level_terms })
}

/// Constant `C` with `wavelet_slice_bound <= C (|k|_B + ||k||_inf)` for every
/// symbol on the grid: `2^{1/p-1} max(C_w, C_s)` where
/// `C_w = max_j sqrt(N_c) ||phi_{j,0}||_inf (2^j/L)^{-1/2}` and
/// `C_s = ||phi_{0,0}||_inf ||phi_{0,0}||_1`.
pub fn besov_constant(ws: &WaveletSlices, length: f64, p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    let c_s = sup(&ws.scaling_basis) * ws.scaling_basis.iter().map(|v| v.abs()).sum::<f64>() * ws.x_spacing;
    let c_w = ws
        .basis
        .iter()
        .enumerate()
        .map(|(j, b)| (class_count(&ws.filter, j as u32) as f64).sqrt() * sup(b) / (2f64.powi(j as i32) / length).sqrt())
        .fold(0.0, f64::max);
    Ok(2f64.powf(1.0 / p - 1.0) * c_w.max(c_s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub label: String,
    pub p: f64,
    pub lower_bound: f64,
    /// Rigorous bounds, present for `p <= 1`: `partition`, `wavelet_slice`
    /// and `besov` (`besov_constant * besov_rhs`).
    pub upper_bounds: BTreeMap<String, f64>,
    /// `|k|_{B^{1/p_flat}_{p_flat,p}(L_inf)} + ||k||_inf`.
    pub besov_rhs: f64,
    pub seminorm: f64,
    pub bounded_norm: f64,
    /// `lower_bound / besov_rhs`.
    pub empirical_constant: f64,
    /// Number of strips of the best partition bound.
    pub partition_strips: usize,
    pub witnesses: Witnesses,
    pub seed: u64,
    pub heuristic: bool,
    /// `lower_bound <= min(upper_bounds) + 1e-6`.
    pub consistent: bool,
}

pub const CONSISTENCY_TOLERANCE: f64 = 1e-6;

/// Lower bound, rigorous upper bounds and the Besov right-hand side of a
/// sampled symbol.
pub fn besov_schur_estimate(k: &SampledKernel, filter: &WaveletFilter, p: f64, budget: &SearchBudget, seed: u64) -> Result<SchurReport> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    let symbol = SchurSymbol::Sampled(k.clone());
    let pf = p_flat(p);
    let field = analyze_kernel(k, filter, 0)?;
    let seminorm = besov_seminorm(&field, &BesovParams::new(1.0 / pf, pf, p, ValueNorm::Linf)?)?;
    let bounded_norm = symbol.bounded_norm();
    let besov_rhs = seminorm + bounded_norm;
    let lower = rank_one_lower_bound(&symbol, p, budget, seed)?;

    let mut upper_bounds = BTreeMap::new();
    let mut partition_strips = 0;
    if p <= 1.0 {
        let mut best = f64::INFINITY;
        for e in 0..=k.grid_x.levels.min(6) {
            let b = partition_upper_bound(&symbol, &dyadic_breakpoints(&symbol, e), p)?;
            if b.value < best {
                best = b.value;
                partition_strips = 1 << e;
            }
        }
        upper_bounds.insert("partition".to_string(), best);
        let ws = wavelet_slices(k, filter)?;
        upper_bounds.insert("wavelet_slice".to_string(), slice_bound_of(&ws, p)?.value);
        upper_bounds.insert("besov".to_string(), besov_constant(&ws, k.grid_x.length(), p)? * besov_rhs);
    }
    let min_upper = upper_bounds.values().copied().fold(f64::INFINITY, f64::min);
    Ok(SchurReport {
        label: k.label.clone(),
        p,
        lower_bound: lower.value,
        upper_bounds,
        besov_rhs,
        seminorm,
        bounded_norm,
        empirical_constant: if besov_rhs > 0.0 { lower.value / besov_rhs } else { 0.0 },
        partition_strips,
        witnesses: Witnesses { xi: lower.xi, eta: lower.eta },
        seed,
        heuristic: p > 1.0,
        consistent: lower.value <= min_upper + CONSISTENCY_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    /// Best values of the two independent seed batches.
    pub batches: [f64; 2],
    /// Batches agree within one percent.
    pub stable: bool,
}

/// Dense random-start search for `||A||_{M_p}` of a small matrix (`p <= 1`).
pub fn matrix_mp_oracle(a: &DMatrix<f64>, p: f64, budget: &SearchBudget, seed: u64) -> Result<OracleResult> {
    let (m, n) = a.shape();
    if m > ORACLE_MAX_SIZE || n > ORACLE_MAX_SIZE {
        return Err(Error::MatrixTooLarge(m, n));
    }
    check_p(p, 1.0)?;
    let dense = SearchBudget { restarts: budget.samples.max(budget.restarts), ..*budget };
    let b0 = search_matrix(a, p, &dense, seed, "oracle-batch-0")?.0;
    let b1 = search_matrix(a, p, &dense, seed, "oracle-batch-1")?.0;
    let value = b0.max(b1);
    Ok(OracleResult {
        value,
        batches: [b0, b1],
        stable: (b0 - b1).abs() <= 0.01 * value.max(f64::MIN_POSITIVE),
    })
}
