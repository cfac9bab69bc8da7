//! Sampled kernels `k(x, y)` on dyadic grids: analytic families, kernels
//! synthesized from planted wavelet coefficients, and a plain-text file
//! format.
//!
//! Rows are indexed by `x`, columns by `y`, so row `i` is the slice
//! `k(x_i, .)` and column `m` is the function `x -> k(x, y_m)` that the
//! wavelet analysis transforms.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic_wavelet::{inverse_dwt, log2_exact, DyadicGrid, WaveletFilter, WaveletPyramid};
use crate::error::{Error, Result};
use crate::rng;
use crate::seqspace::{ell_p, NonnegSeq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledKernel {
    pub grid_x: DyadicGrid,
    pub grid_y: DyadicGrid,
    /// Row-major, `2^Jx` rows of `2^Jy` values.
    pub values: Vec<f64>,
    pub label: String,
}

impl SampledKernel {
    pub fn new(grid_x: DyadicGrid, grid_y: DyadicGrid, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let expected = grid_x.point_count() * grid_y.point_count();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!("{} values for a {}x{} grid", values.len(), grid_x.point_count(), grid_y.point_count())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch(format!("non-finite value at flat index {i}")));
        }
        Ok(Self { grid_x, grid_y, values, label: label.into() })
    }

    pub fn zeros(grid_x: DyadicGrid, grid_y: DyadicGrid, label: impl Into<String>) -> Self {
        Self {
            values: vec![0.0; grid_x.point_count() * grid_y.point_count()],
            grid_x,
            grid_y,
            label: label.into(),
        }
    }

    pub fn from_fn(grid_x: DyadicGrid, grid_y: DyadicGrid, label: impl Into<String>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let xs = grid_x.points();
        let ys = grid_y.points();
        let values = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(grid_x, grid_y, values, label)
    }

    pub fn rows(&self) -> usize {
        self.grid_x.point_count()
    }

    pub fn cols(&self) -> usize {
        self.grid_y.point_count()
    }

    pub fn at(&self, i: usize, m: usize) -> f64 {
        self.values[i * self.cols() + m]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.at(i, m)).collect()
    }

    /// Grid L2 norm `(hx hy sum k^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let area = self.grid_x.spacing() * self.grid_y.spacing();
        (area * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    SeparableGaussian,
    TensorBump,
    FractionalRough,
    WaveletSynthetic,
    File,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 5] = [
        KernelFamily::SeparableGaussian,
        KernelFamily::TensorBump,
        KernelFamily::FractionalRough,
        KernelFamily::WaveletSynthetic,
        KernelFamily::File,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::SeparableGaussian => "separable_gaussian",
            KernelFamily::TensorBump => "tensor_bump",
            KernelFamily::FractionalRough => "fractional_rough",
            KernelFamily::WaveletSynthetic => "wavelet_synthetic",
            KernelFamily::File => "file",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, KernelFamily::FractionalRough | KernelFamily::WaveletSynthetic)
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily) -> Self {
        Self { family, params: BTreeMap::new(), seed: None }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn required(&self, name: &str) -> Result<f64> {
        self.params.get(name).copied().ok_or_else(|| Error::ParameterMissing(name.to_string()))
    }

    fn or(&self, name: &str, default: f64) -> f64 {
        self.params.get(name).copied().unwrap_or(default)
    }

    fn level(&self, name: &str) -> Result<Option<u32>> {
        match self.params.get(name) {
            None => Ok(None),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 && v <= 30.0 => Ok(Some(v as u32)),
            Some(&v) => Err(Error::ParameterOutOfRange {
                name: name.to_string(),
                reason: format!("{v} is not a level"),
            }),
        }
    }

    /// Planted-coefficient settings for the random families.
    pub fn planted(&self) -> Result<PlantedSpec> {
        let alpha = self.required("alpha")?;
        let (p, density) = match self.family {
            KernelFamily::FractionalRough => (self.or("p", 1.0 / (alpha + 0.5)), self.or("density", 1.0)),
            KernelFamily::WaveletSynthetic => (self.required("p")?, self.or("density", 0.5)),
            other => {
                return Err(Error::ParameterOutOfRange {
                    name: "family".into(),
                    reason: format!("{} has no planted coefficients", other.name()),
                })
            }
        };
        let seed = self.seed.ok_or_else(|| Error::ParameterMissing("seed".into()))?;
        // The rough family uses every Haar position at every level, so level j
        // holds exactly 2^j coefficients.
        let rough = self.family == KernelFamily::FractionalRough;
        let default_order = if rough { 1.0 } else { 3.0 };
        let order = self.or("filter_order", default_order);
        if order.fract() != 0.0 || order < 1.0 {
            return Err(Error::ParameterOutOfRange { name: "filter_order".into(), reason: format!("{order}") });
        }
        Ok(PlantedSpec {
            alpha,
            p,
            filter: WaveletFilter::daubechies(order as usize)?,
            min_level: self.level("min_level")?.unwrap_or(0),
            max_level: self.level("max_level")?,
            density,
            profile_level: self.level("profile_level")?,
            profile: if rough { ProfileKind::MatchedHaar } else { ProfileKind::RandomCells },
            region: if rough { SupportRegion::FullBox } else { SupportRegion::CentralHalf },
            seed,
        })
    }
}

fn gaussian(t: f64, c: f64, sigma: f64) -> f64 {
    (-((t - c) / sigma).powi(2)).exp()
}

/// `exp(1 - 1/(1 - u^2))` on `|u| < 1`, peak value one.
fn bump(t: f64, c: f64, r: f64) -> f64 {
    let u = (t - c) / r;
    if u.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

fn centre(g: &DyadicGrid) -> f64 {
    0.5 * (g.start + g.end)
}

/// Samples a built-in family. Random families draw from their planted
/// coefficient model; see [`synthesize_planted`] for the ground truth.
pub fn sample_builtin(spec: &KernelSpec, grid_x: &DyadicGrid, grid_y: &DyadicGrid) -> Result<SampledKernel> {
    match spec.family {
        KernelFamily::SeparableGaussian => {
            let (c1, c2) = (spec.or("c1", centre(grid_x)), spec.or("c2", centre(grid_y)));
            let s1 = spec.or("sigma1", grid_x.length() / 8.0);
            let s2 = spec.or("sigma2", grid_y.length() / 8.0);
            let gx: Vec<f64> = grid_x.points().iter().map(|&x| gaussian(x, c1, s1)).collect();
            let gy: Vec<f64> = grid_y.points().iter().map(|&y| gaussian(y, c2, s2)).collect();
            let values = gx.iter().flat_map(|a| gy.iter().map(move |b| a * b)).collect();
            SampledKernel::new(*grid_x, *grid_y, values, "separable_gaussian")
        }
        KernelFamily::TensorBump => {
            let amp = spec.or("amplitude", 1.0);
            let (c1, c2) = (spec.or("c1", centre(grid_x)), spec.or("c2", centre(grid_y)));
            let r1 = spec.or("r1", grid_x.length() / 4.0);
            let r2 = spec.or("r2", grid_y.length() / 4.0);
            SampledKernel::from_fn(*grid_x, *grid_y, "tensor_bump", |x, y| amp * bump(x, c1, r1) * bump(y, c2, r2))
        }
        KernelFamily::FractionalRough | KernelFamily::WaveletSynthetic => {
            let planted = synthesize_planted(&spec.planted()?, grid_x, grid_y)?;
            let mut k = planted.kernel;
            k.label = format!("{}:seed{}", spec.family.name(), spec.seed.unwrap_or(0));
            Ok(k)
        }
        KernelFamily::File => Err(Error::UnknownFamily("file (use load_kernel)".into())),
    }
}

/// Finest planted level of corpus kernels, so that refining the grid beyond
/// `CORPUS_MAX_LEVEL + 1` leaves their coefficient fields unchanged.
pub const CORPUS_MAX_LEVEL: u32 = 5;

/// Named specs of the standard kernel corpus, sorted by name.
pub fn corpus_specs() -> Vec<(String, KernelSpec)> {
    use KernelFamily::*;
    let planted = |family, alpha: f64, seed| KernelSpec::new(family).with("alpha", alpha).with("max_level", CORPUS_MAX_LEVEL as f64).seeded(seed);
    let mut v = vec![
        ("gaussian".to_string(), KernelSpec::new(SeparableGaussian)),
        ("gaussian_narrow".to_string(), KernelSpec::new(SeparableGaussian).with("sigma1", 1.0 / 32.0).with("sigma2", 1.0 / 16.0).with("c1", 0.4)),
        ("bump".to_string(), KernelSpec::new(TensorBump)),
        ("bump_offset".to_string(), KernelSpec::new(TensorBump).with("c1", 0.3).with("r1", 0.15).with("amplitude", -2.0)),
        ("rough_a0.75_s9".to_string(), planted(FractionalRough, 0.75, 9)),
        ("rough_a1_s1".to_string(), planted(FractionalRough, 1.0, 1)),
        ("rough_a1_s2".to_string(), planted(FractionalRough, 1.0, 2)),
        ("synthetic_a1_p1_s13".to_string(), planted(WaveletSynthetic, 1.0, 13).with("p", 1.0)),
        ("synthetic_a0.5_p0.67_s7".to_string(), planted(WaveletSynthetic, 0.5, 7).with("p", 2.0 / 3.0)),
    ];
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Corpus kernels on the unit square with `2^levels` points per side, plus
/// the constant kernel `1`; labels are the corpus names.
pub fn corpus(levels: u32) -> Result<Vec<SampledKernel>> {
    let g = DyadicGrid::unit(levels);
    let mut out = vec![SampledKernel::from_fn(g, g, "constant", |_, _| 1.0)?];
    for (name, spec) in corpus_specs() {
        let mut k = sample_builtin(&spec, &g, &g)?;
        k.label = name;
        out.push(k);
    }
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

/// Settings of the planted-coefficient generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub alpha: f64,
    pub p: f64,
    pub filter: WaveletFilter,
    pub min_level: u32,
    /// Finest planted level; defaults to `Jx - 1`.
    pub max_level: Option<u32>,
    /// Probability that an admissible position carries a coefficient.
    pub density: f64,
    /// Level of the piecewise-constant `y` profiles; defaults to `min(Jy, 7)`.
    pub profile_level: Option<u32>,
    pub profile: ProfileKind,
    pub region: SupportRegion,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(alpha: f64, p: f64, filter: WaveletFilter, seed: u64) -> Self {
        Self { alpha, p, filter, min_level: 0, max_level: None, density: 0.5, profile_level: None, profile: ProfileKind::RandomCells, region: SupportRegion::CentralHalf, seed }
    }
}

/// Shape of the `y` dependence of each planted coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Independent random heights on the cells of the profile level.
    RandomCells,
    /// The Haar function in `y` with the coefficient's own `(j, k)`; the
    /// profiles are then orthonormal and the singular values of the kernel
    /// are the planted norms.
    MatchedHaar,
}

/// Where planted wavelets may sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportRegion {
    /// Support inside the central half of the box, away from the periodic seam.
    CentralHalf,
    /// Any position whose support does not wrap around the box.
    FullBox,
}

/// One planted coefficient `c_{j,k}` as a function of `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCoefficient {
    pub level: u32,
    pub shift: u64,
    /// Continuum values at the y-grid points.
    pub values: Vec<f64>,
    /// Continuum L2 norm of `values`.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedKernel {
    pub kernel: SampledKernel,
    pub ground_truth: f64,
    pub coefficients: Vec<PlantedCoefficient>,
}

/// Translations `k` at level `j` whose support `[k, k + 2N - 1] 2^-j`
/// (box-relative) lies in `region`.
pub fn admissible_shifts(filter: &WaveletFilter, level: u32, region: SupportRegion) -> std::ops::Range<u64> {
    let n = 1u64 << level;
    let (lo, hi) = match region {
        SupportRegion::CentralHalf => (n.div_ceil(4), (3 * n) / 4),
        SupportRegion::FullBox => (0, n),
    };
    let width = filter.support_length() as u64;
    if hi < lo + width {
        0..0
    } else {
        lo..hi - width + 1
    }
}

/// `(sum_{j,k} ((2^j/L)^{alpha + 1/2 - 1/p} |c_{j,k}|)^p)^{1/p}` over
/// `(level, norm)` pairs, in the order given.
pub fn planted_ground_truth(entries: &[(u32, f64)], alpha: f64, p: f64, length: f64) -> Result<f64> {
    let weighted = entries
        .iter()
        .map(|&(j, c)| (2f64.powi(j as i32) / length).powf(alpha + 0.5 - 1.0 / p) * c.abs());
    ell_p(&NonnegSeq::from_abs(weighted), p)
}

fn check_planted(spec: &PlantedSpec) -> Result<()> {
    if !(spec.alpha > 0.0 && spec.alpha.is_finite()) {
        return Err(Error::InvalidExponent { name: "alpha", value: spec.alpha });
    }
    if !(spec.p > 0.0 && spec.p <= 2.0) {
        return Err(Error::InvalidExponent { name: "p", value: spec.p });
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::ParameterOutOfRange { name: "density".into(), reason: format!("{} not in (0, 1]", spec.density) });
    }
    Ok(())
}

/// Piecewise-constant profile on the central half of the y box with unit
/// continuum L2 norm.
fn profile<R: Rng>(rng: &mut R, cell_level: u32, grid_y: &DyadicGrid) -> Vec<f64> {
    let cells = 1usize << cell_level;
    let lo = cells / 4;
    let hi = 3 * cells / 4;
    let heights: Vec<f64> = (lo..hi.max(lo + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let per_cell = grid_y.point_count() >> cell_level;
    let mut values = vec![0.0; grid_y.point_count()];
    for (c, &h) in heights.iter().enumerate() {
        let start = (lo + c) * per_cell;
        values[start..start + per_cell].iter_mut().for_each(|v| *v = h);
    }
    let norm = (grid_y.spacing() * values.iter().map(|v| v * v).sum::<f64>()).sqrt();
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v /= norm);
    }
    values
}

/// Haar function `(2^j/L)^{1/2} h(2^j (y - a)/L - k)` on the y grid.
fn haar_profile(level: u32, shift: u64, grid_y: &DyadicGrid) -> Vec<f64> {
    let n = grid_y.point_count();
    let width = n >> level;
    let amp = (2f64.powi(level as i32) / grid_y.length()).sqrt();
    let start = shift as usize * width;
    let mut values = vec![0.0; n];
    for (i, v) in values[start..start + width].iter_mut().enumerate() {
        *v = if i < width / 2 { amp } else { -amp };
    }
    values
}

/// Synthesizes `k = sum c_{j,k} phi_{j,k}` with prescribed coefficient norms
/// `(2^j/L)^{-(alpha + 1/2)} |xi_{j,k}|`, `xi` uniform in `[1/2, 1]` with a
/// random sign, on a random subset of the admissible positions.
///
/// The kernel is the exact discrete synthesis of the planted field, so the
/// calibrated analysis with the same filter returns it to rounding error.
pub fn synthesize_planted(spec: &PlantedSpec, grid_x: &DyadicGrid, grid_y: &DyadicGrid) -> Result<PlantedKernel> {
    check_planted(spec)?;
    let jx = grid_x.levels;
    let max_level = spec.max_level.unwrap_or(jx.saturating_sub(1)).min(jx.saturating_sub(1));
    if jx == 0 || spec.min_level > max_level {
        return Err(Error::ScaleRangeTooSmall);
    }
    let cell_level = spec.profile_level.unwrap_or(grid_y.levels.min(7)).min(grid_y.levels);
    if spec.profile == ProfileKind::MatchedHaar && max_level >= grid_y.levels {
        return Err(Error::ScaleRangeTooSmall);
    }
    let length = grid_x.length();

    let mut rng = rng::task_rng(spec.seed, "planted");
    let mut chosen = Vec::new();
    let mut fallback: Option<(f64, u32, u64)> = None;
    for level in spec.min_level..=max_level {
        for shift in admissible_shifts(&spec.filter, level, spec.region) {
            let u: f64 = rng.gen();
            if fallback.is_none_or(|(best, _, _)| u < best) {
                fallback = Some((u, level, shift));
            }
            if u < spec.density {
                chosen.push((level, shift));
            }
        }
    }
    let Some((_, fl, fs)) = fallback else {
        return Err(Error::ScaleRangeTooSmall);
    };
    if chosen.is_empty() {
        chosen.push((fl, fs));
    }

    let mut coefficients = Vec::with_capacity(chosen.len());
    for (index, &(level, shift)) in chosen.iter().enumerate() {
        let mut r = rng::indexed_rng(spec.seed, "planted-coefficient", index as u64);
        let xi: f64 = r.gen_range(0.5..1.0);
        let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
        let norm = (2f64.powi(level as i32) / length).powf(-(spec.alpha + 0.5)) * xi;
        let shape = match spec.profile {
            ProfileKind::RandomCells => profile(&mut r, cell_level, grid_y),
            ProfileKind::MatchedHaar => haar_profile(level, shift, grid_y),
        };
        let values = shape.into_iter().map(|v| sign * norm * v).collect();
        coefficients.push(PlantedCoefficient { level, shift, values, norm });
    }

    let kernel = synthesize_from_field(&coefficients, &spec.filter, grid_x, grid_y, "planted")?;
    let entries: Vec<(u32, f64)> = coefficients.iter().map(|c| (c.level, c.norm)).collect();
    let ground_truth = planted_ground_truth(&entries, spec.alpha, spec.p, length)?;
    Ok(PlantedKernel { kernel, ground_truth, coefficients })
}

/// The kernel whose calibrated wavelet field (coarsest level 0, zero scaling
/// part) is exactly `coefficients`.
pub fn synthesize_from_field(
    coefficients: &[PlantedCoefficient],
    filter: &WaveletFilter,
    grid_x: &DyadicGrid,
    grid_y: &DyadicGrid,
    label: &str,
) -> Result<SampledKernel> {
    let jx = grid_x.levels;
    let cols = grid_y.point_count();
    let inv_sqrt_h = 1.0 / grid_x.spacing().sqrt();
    for c in coefficients {
        if c.level >= jx || c.shift >= 1u64 << c.level {
            return Err(Error::LevelOutOfRange { level: c.level as i64, levels: jx });
        }
        if c.values.len() != cols {
            return Err(Error::ShapeMismatch(format!("profile of length {} on {} y points", c.values.len(), cols)));
        }
    }
    let mut values = vec![0.0; grid_x.point_count() * cols];
    for m in 0..cols {
        let mut pyramid = WaveletPyramid::zeros(0, jx);
        for c in coefficients {
            let d = pyramid.detail_mut(c.level).expect("level checked above");
            d[c.shift as usize] += c.values[m] * inv_sqrt_h;
        }
        for (i, v) in inverse_dwt(&pyramid, filter)?.into_iter().enumerate() {
            values[i * cols + m] = v;
        }
    }
    SampledKernel::new(*grid_x, *grid_y, values, label)
}

/// Planted synthesis with the default generator settings; returns the kernel
/// and its exact Besov ground truth.
pub fn synthesize_from_coefficients(
    alpha: f64,
    p: f64,
    filter: &WaveletFilter,
    grid_x: &DyadicGrid,
    grid_y: &DyadicGrid,
    seed: u64,
) -> Result<(SampledKernel, f64)> {
    let planted = synthesize_planted(&PlantedSpec::new(alpha, p, filter.clone(), seed), grid_x, grid_y)?;
    Ok((planted.kernel, planted.ground_truth))
}

const MAGIC: &str = "KERNEL v1";

pub fn kernel_to_string(k: &SampledKernel) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let (gx, gy) = (&k.grid_x, &k.grid_y);
    let _ = writeln!(out, "{} {} {:?} {:?} {:?} {:?}", gx.levels, gy.levels, gx.start, gx.end, gy.start, gy.end);
    for i in 0..k.rows() {
        let row: Vec<String> = k.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_kernel(k: &SampledKernel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, kernel_to_string(k))?;
    Ok(())
}

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::FormatError { line, message: message.into() }
}

pub fn parse_kernel(text: &str, label: &str) -> Result<SampledKernel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(format_error(1, format!("expected `{MAGIC}`"))),
    }
    let (_, header) = lines.next().ok_or_else(|| format_error(2, "missing grid header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(format_error(2, "expected `Jx Jy ax bx ay by`"));
    }
    let jx: u32 = fields[0].parse().map_err(|_| format_error(2, "Jx is not an integer"))?;
    let jy: u32 = fields[1].parse().map_err(|_| format_error(2, "Jy is not an integer"))?;
    let mut bounds = [0.0; 4];
    for (b, f) in bounds.iter_mut().zip(&fields[2..]) {
        *b = f.parse().map_err(|_| format_error(2, format!("`{f}` is not a number")))?;
    }

    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut width = None;
    for (line, text) in lines {
        if text.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for token in text.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| format_error(line, format!("`{token}` is not a number")))?;
            if !v.is_finite() {
                return Err(format_error(line, "non-finite value"));
            }
            values.push(v);
        }
        let w = values.len() - before;
        match width {
            None => width = Some(w),
            Some(expected) if expected != w => {
                return Err(format_error(line, format!("row has {w} values, previous rows have {expected}")));
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = width.ok_or_else(|| format_error(3, "no data rows"))?;
    log2_exact(rows).map_err(|_| Error::NonPowerOfTwoGrid(rows))?;
    log2_exact(cols).map_err(|_| Error::NonPowerOfTwoGrid(cols))?;
    if rows != 1usize.checked_shl(jx).unwrap_or(0) || cols != 1usize.checked_shl(jy).unwrap_or(0) {
        return Err(format_error(2, format!("header declares 2^{jx} x 2^{jy} but the data is {rows} x {cols}")));
    }
    let grid_x = DyadicGrid::new(jx, bounds[0], bounds[1]).map_err(|e| format_error(2, e.to_string()))?;
    let grid_y = DyadicGrid::new(jy, bounds[2], bounds[3]).map_err(|e| format_error(2, e.to_string()))?;
    SampledKernel::new(grid_x, grid_y, values, label)
}

pub fn load_kernel(path: impl AsRef<Path>) -> Result<SampledKernel> {
    let path = path.as_ref();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::FileNotFound(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("kernel");
    parse_kernel(&text, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_wavelet::forward_dwt;

    fn unit(levels: u32) -> DyadicGrid {
        DyadicGrid::unit(levels)
    }

    #[test]
    fn gaussian_is_outer_product() {
        let g = unit(6);
        let k = sample_builtin(&KernelSpec::new(KernelFamily::SeparableGaussian), &g, &g).unwrap();
        let a: Vec<f64> = g.points().iter().map(|&x| gaussian(x, 0.5, 0.125)).collect();
        for i in 0..64 {
            for m in 0..64 {
                assert_eq!(k.at(i, m), a[i] * a[m]);
            }
        }
    }

    #[test]
    fn zero_amplitude_bump() {
        let g = unit(5);
        let k = sample_builtin(&KernelSpec::new(KernelFamily::TensorBump).with("amplitude", 0.0), &g, &g).unwrap();
        assert!(k.is_zero());
        let k = sample_builtin(&KernelSpec::new(KernelFamily::TensorBump), &g, &g).unwrap();
        assert!((k.sup_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fractional_rough_is_reproducible() {
        let g = unit(6);
        let spec = KernelSpec::new(KernelFamily::FractionalRough).with("alpha", 0.75).seeded(9);
        let a = sample_builtin(&spec, &g, &g).unwrap();
        let b = sample_builtin(&spec, &g, &g).unwrap();
        assert_eq!(kernel_to_string(&a), kernel_to_string(&b));
        assert!(!a.is_zero());
    }

    #[test]
    fn missing_parameters() {
        let g = unit(5);
        let spec = KernelSpec::new(KernelFamily::WaveletSynthetic).with("p", 1.0).seeded(1);
        assert!(matches!(sample_builtin(&spec, &g, &g), Err(Error::ParameterMissing(n)) if n == "alpha"));
        let spec = KernelSpec::new(KernelFamily::FractionalRough).with("alpha", 1.0);
        assert!(matches!(sample_builtin(&spec, &g, &g), Err(Error::ParameterMissing(n)) if n == "seed"));
        assert!(matches!("sinc".parse::<KernelFamily>(), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn ground_truth_examples() {
        assert_eq!(planted_ground_truth(&[(0, 1.0)], 0.7, 1.3, 1.0).unwrap(), 1.0);
        let alpha = 0.8;
        let two = planted_ground_truth(&[(0, 1.0), (1, 1.0)], alpha, 1.0, 1.0).unwrap();
        assert!((two - (1.0 + 2f64.powf(alpha + 0.5 - 1.0))).abs() < 1e-15);
    }

    #[test]
    fn single_coefficient_synthesis() {
        let g = unit(6);
        let f = WaveletFilter::daubechies(2).unwrap();
        let coeff = PlantedCoefficient { level: 0, shift: 0, values: vec![1.0; 64], norm: 1.0 };
        let k = synthesize_from_field(&[coeff], &f, &g, &g, "one").unwrap();
        assert!((k.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthesis_is_recovered_by_the_transform() {
        let g = unit(8);
        let f = WaveletFilter::daubechies(3).unwrap();
        let planted = synthesize_planted(&PlantedSpec::new(1.0, 1.0, f.clone(), 13), &g, &g).unwrap();
        let h = g.spacing().sqrt();
        for c in &planted.coefficients {
            let m = c.values.iter().position(|v| *v != 0.0).unwrap();
            let p = forward_dwt(&planted.kernel.column(m), &f, 0).unwrap();
            let got = h * p.detail(c.level).unwrap()[c.shift as usize];
            assert!((got - c.values[m]).abs() <= 1e-10 * c.values[m].abs());
        }
        for c in &planted.coefficients {
            let ks = admissible_shifts(&f, c.level, SupportRegion::CentralHalf);
            assert!(ks.contains(&c.shift));
        }
    }

    #[test]
    fn support_in_central_half() {
        let g = unit(8);
        let f = WaveletFilter::daubechies(2).unwrap();
        let planted = synthesize_planted(&PlantedSpec { density: 1.0, ..PlantedSpec::new(1.0, 1.0, f, 2) }, &g, &g).unwrap();
        let k = &planted.kernel;
        for i in 0..256 {
            for m in 0..256 {
                let outside = !(64..192).contains(&i) || !(64..192).contains(&m);
                if outside {
                    assert!(k.at(i, m).abs() < 1e-12, "({i},{m}) = {}", k.at(i, m));
                }
            }
        }
    }

    #[test]
    fn scale_range_errors() {
        let g = unit(3);
        let f = WaveletFilter::daubechies(4).unwrap();
        assert!(matches!(synthesize_from_coefficients(1.0, 1.0, &f, &g, &g, 1), Err(Error::ScaleRangeTooSmall)));
        let spec = PlantedSpec { min_level: 5, max_level: Some(4), ..PlantedSpec::new(1.0, 1.0, f, 1) };
        assert!(matches!(synthesize_planted(&spec, &unit(8), &unit(8)), Err(Error::ScaleRangeTooSmall)));
    }

    #[test]
    fn file_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.txt");
        let gx = DyadicGrid::new(4, -1.0, 2.5).unwrap();
        let gy = DyadicGrid::new(3, 0.0, 1.0).unwrap();
        let k = SampledKernel::from_fn(gx, gy, "k", |x, y| (x * 3.1).sin() / (1.0 + y * y) * 1e-7).unwrap();
        write_kernel(&k, &path).unwrap();
        let back = load_kernel(&path).unwrap();
        assert_eq!(back.values, k.values);
        assert_eq!(back.grid_x, gx);
        assert_eq!(back.grid_y, gy);
    }

    #[test]
    fn file_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_kernel(dir.path().join("missing.txt")), Err(Error::FileNotFound(_))));

        let g = unit(4);
        let k = sample_builtin(&KernelSpec::new(KernelFamily::SeparableGaussian), &g, &g).unwrap();
        let text = kernel_to_string(&k);
        let cut = &text[..text.len() / 2];
        assert!(matches!(parse_kernel(cut, "t"), Err(Error::FormatError { .. })));
        assert!(matches!(parse_kernel("KERNEL v2\n", "t"), Err(Error::FormatError { line: 1, .. })));

        let mut rows = String::from("KERNEL v1\n6 2 0 1 0 1\n");
        for _ in 0..48 {
            rows.push_str("0 0 0 0\n");
        }
        assert!(matches!(parse_kernel(&rows, "t"), Err(Error::NonPowerOfTwoGrid(48))));
    }
}
