//! Verification suites behind `besovop verify <suite>`.

use std::collections::BTreeMap;

use besovop_core::besov_analysis::verify_nonlinear_equivalence;
use besovop_core::dyadic_wavelet::{DyadicGrid, WaveletFilter};
use besovop_core::kernel_model::{corpus, sample_builtin, KernelFamily, KernelSpec, SampledKernel, CORPUS_MAX_LEVEL};
use besovop_core::rng;
use besovop_core::schur_mult::{besov_schur_estimate, matrix_mp_oracle, rank_one_lower_bound, SchurSymbol};
use besovop_core::seqspace::{hardy_check, NonnegSeq};
use besovop_core::spectral::{
    check_lpq_equivalence, check_mu_estimate, decay_rate, discretize, embedding_report, middle_decade, singular_values, svd,
    SingularSpectrum,
};
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::num;
use crate::config::{CliResult, RunConfig, Suite};
use crate::thresholds::{for_suite, threshold, Threshold};

type CoreResult<T> = besovop_core::error::Result<T>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub label: String,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Case {
    fn new(label: impl Into<String>) -> Self {
        Self { label: label.into(), metrics: BTreeMap::new(), pass: true, error: None }
    }

    fn metric(mut self, name: &str, v: f64) -> Self {
        self.metrics.insert(name.to_string(), v);
        self
    }

    fn failed(label: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Self { label: label.into(), metrics: BTreeMap::new(), pass: false, error: Some(e.to_string()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub relation: &'static str,
    pub pass: bool,
}

fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, limit, relation: "<=", pass: value <= limit }
}

fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, limit, relation: ">=", pass: value >= limit }
}

fn equal(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, limit, relation: "==", pass: value == limit }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub pass: bool,
    pub worst_ratio: f64,
    pub checks: Vec<Check>,
    pub cases: Vec<Case>,
    pub thresholds: Vec<Threshold>,
    pub config: RunConfig,
}

impl SuiteReport {
    fn new(suite: Suite, cfg: &RunConfig, worst_ratio: f64, checks: Vec<Check>, mut cases: Vec<Case>) -> Self {
        cases.sort_by(|a, b| a.label.cmp(&b.label));
        let pass = checks.iter().all(|c| c.pass) && cases.iter().all(|c| c.pass);
        Self { suite: suite.name(), pass, worst_ratio, checks, cases, thresholds: for_suite(suite.name()), config: cfg.clone() }
    }

    /// `label,metric,value` rows, checks first.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .checks
            .iter()
            .map(|c| vec!["check".into(), c.name.clone(), num(c.value), num(c.limit), c.relation.into(), c.pass.to_string()])
            .collect();
        for case in &self.cases {
            for (m, v) in &case.metrics {
                rows.push(vec!["case".into(), format!("{}:{m}", case.label), num(*v), String::new(), String::new(), case.pass.to_string()]);
            }
            if let Some(e) = &case.error {
                rows.push(vec!["case".into(), format!("{}:error", case.label), String::new(), String::new(), String::new(), format!("\"{}\"", e.replace('"', "'"))]);
            }
        }
        rows
    }
}

pub const CSV_HEADER: [&str; 6] = ["kind", "name", "value", "limit", "relation", "pass"];

pub fn run(suite: Suite, cfg: &RunConfig) -> CliResult<SuiteReport> {
    match suite {
        Suite::Hardy => hardy(cfg),
        Suite::MuEstimate => mu_estimate(cfg),
        Suite::Lpq => lpq(cfg),
        Suite::Nonlinear => nonlinear(cfg),
        Suite::MainEmbedding => main_embedding(cfg),
        Suite::Schur => schur(cfg),
    }
}

/// `max |r_i - r_0| / r_0` over a sequence of ratios, or `inf` if any is
/// nonfinite or the first vanishes.
fn drift(ratios: &[f64]) -> f64 {
    let first = ratios[0];
    if !(first > 0.0) || ratios.iter().any(|r| !r.is_finite()) {
        return f64::INFINITY;
    }
    ratios.iter().map(|r| (r - first).abs() / first).fold(0.0, f64::max)
}

/// Largest relative change between consecutive ratios.
fn step_drift(ratios: &[f64]) -> f64 {
    ratios
        .windows(2)
        .map(|w| if w[0] > 0.0 && w[1].is_finite() { (w[1] - w[0]).abs() / w[0] } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

fn q_label(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        num(q)
    }
}

fn cummin(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut m = f64::INFINITY;
    v.map(|x| {
        m = m.min(x);
        m
    })
    .collect()
}

/// Positive nonincreasing test sequences of a named profile.
fn profile_sequences(profile: &str, len: usize, cfg: &RunConfig) -> Vec<(String, Vec<f64>)> {
    match profile {
        "geometric" => vec![("geometric".into(), (0..len).map(|n| 0.9f64.powi(n as i32)).collect())],
        "power" => vec![("power".into(), (0..len).map(|n| (n as f64 + 1.0).powf(-1.5)).collect())],
        _ => cfg
            .seeds
            .iter()
            .map(|s| {
                let mut r = rng::task_rng(s, "hardy-profile");
                let v = cummin((0..len).map(|n| (n as f64 + 1.0).powf(-1.5) * (1.0 + 0.5 * r.gen::<f64>())));
                (format!("seeded:{s}"), v)
            })
            .collect(),
    }
}

/// Hardy transform with `r = 1/2`, `mu = 2`, `s = 1` and `q` in `{1, inf}`
/// on lengths `2^8 .. 2^J`.
fn hardy(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (r, mu, s) = (0.5, 2.0, 1.0);
    let max_drift = threshold("hardy", "max_drift");
    let profiles: Vec<&str> = match &cfg.profile {
        Some(p) => vec![p.as_str()],
        None => vec!["geometric", "power", "seeded"],
    };
    let lengths: Vec<usize> = (8..=cfg.levels).map(|j| 1usize << j).collect();
    let longest = *lengths.last().expect("at least two lengths");
    let mut jobs = Vec::new();
    for profile in profiles {
        for (label, seq) in profile_sequences(profile, longest, cfg) {
            for q in [1.0, f64::INFINITY] {
                jobs.push((format!("{label}:q={}", q_label(q)), seq.clone(), q));
            }
        }
    }
    let cases: Vec<Case> = jobs
        .par_iter()
        .map(|(label, seq, q)| {
            let ratios: CoreResult<Vec<f64>> =
                lengths.iter().map(|&n| hardy_check(&NonnegSeq::new(seq[..n].to_vec())?, r, mu, s, *q)).collect();
            match ratios {
                Err(e) => Case::failed(label.clone(), e),
                Ok(ratios) => {
                    let d = step_drift(&ratios);
                    let mut c = Case::new(label.clone()).metric("drift", d);
                    for (n, v) in lengths.iter().zip(&ratios) {
                        c = c.metric(&format!("ratio_{n}"), *v);
                    }
                    c.pass = ratios.iter().all(|v| v.is_finite()) && d <= max_drift;
                    c
                }
            }
        })
        .collect();
    let worst = cases.iter().flat_map(|c| c.metrics.iter().filter(|(k, _)| k.starts_with("ratio")).map(|(_, v)| *v)).fold(0.0, f64::max);
    let worst_drift = cases.iter().filter_map(|c| c.metrics.get("drift")).copied().fold(0.0, f64::max);
    let checks = vec![at_most("max_drift", worst_drift, max_drift), at_most("ratios_finite", if worst.is_finite() { 0.0 } else { 1.0 }, 0.0)];
    Ok(SuiteReport::new(Suite::Hardy, cfg, worst, checks, cases))
}

fn random_matrix(seed: u64, task: &str, m: usize, n: usize) -> DMatrix<f64> {
    let mut r = rng::task_rng(seed, task);
    DMatrix::from_fn(m, n, |_, _| r.gen_range(-1.0..1.0))
}

/// `mu(2n) sqrt(n) <= e(n)` on seeded square matrices and on the corpus.
fn mu_estimate(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let limit = threshold("mu_estimate", "max_ratio");
    let case = |label: String, spec: CoreResult<SingularSpectrum>| match spec.and_then(|s| check_mu_estimate(&s)) {
        Err(e) => Case::failed(label, e),
        Ok(m) => {
            let mut c = Case::new(label).metric("worst_ratio", m.worst_ratio).metric("degenerate", m.degenerate as f64);
            c.pass = m.worst_ratio <= limit;
            c
        }
    };
    let seeds: Vec<u64> = cfg.seeds.iter().collect();
    let mut cases: Vec<Case> = seeds
        .par_iter()
        .map(|&s| {
            let a = random_matrix(s, "mu-estimate-matrix", cfg.size, cfg.size);
            case(format!("matrix:seed{s}"), svd(&a, false).and_then(|d| SingularSpectrum::from_values(d.sigma)))
        })
        .collect();
    let kernels = corpus(cfg.levels)?;
    cases.extend(kernels.par_iter().map(|k| case(format!("kernel:{}", k.label), singular_values(&discretize(k)))).collect::<Vec<_>>());
    let worst = cases.iter().filter_map(|c| c.metrics.get("worst_ratio")).copied().fold(0.0, f64::max);
    Ok(SuiteReport::new(Suite::MuEstimate, cfg, worst, vec![at_most("worst_ratio", worst, limit)], cases))
}

/// Spectra of the `lpq` suite: exact power laws and seeded perturbations,
/// with exponent `1/p` for `q = inf` and `1/p + 1/2` otherwise.
fn lpq_spectra(p: f64, q: f64, len: usize, cfg: &RunConfig) -> Vec<(String, Vec<f64>)> {
    let gamma = if q.is_infinite() { 1.0 / p } else { 1.0 / p + 0.5 };
    let mut out = vec![("power".to_string(), (0..len).map(|n| (n as f64 + 1.0).powf(-gamma)).collect())];
    for s in cfg.seeds.iter() {
        let mut r = rng::task_rng(s, "lpq-spectrum");
        out.push((format!("seeded:{s}"), cummin((0..len).map(|n| (n as f64 + 1.0).powf(-gamma) * (1.0 + 0.5 * r.gen::<f64>())))));
    }
    out
}

/// `||(e_n / sqrt(n+1))||_{l_{p,q}} / ||mu||_{l_{p,q}}` on lengths `2^8 .. 2^12`.
fn lpq(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (low, high, max_drift) = (threshold("lpq", "band_low"), threshold("lpq", "band_high"), threshold("lpq", "max_drift"));
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![0.5, 1.0, 1.5]);
    let lengths: Vec<usize> = (8..=12).map(|j| 1usize << j).collect();
    let mut jobs = Vec::new();
    for &p in &ps {
        let qs = cfg.q.map(|q| vec![q]).unwrap_or_else(|| vec![p, f64::INFINITY]);
        for q in qs {
            for (label, seq) in lpq_spectra(p, q, lengths[lengths.len() - 1], cfg) {
                jobs.push((format!("{label}:p={}:q={}", num(p), q_label(q)), p, q, seq));
            }
        }
    }
    let cases: Vec<Case> = jobs
        .par_iter()
        .map(|(label, p, q, seq)| {
            let ratios: CoreResult<Vec<f64>> = lengths
                .iter()
                .map(|&n| SingularSpectrum::from_values(seq[..n].to_vec()).and_then(|s| check_lpq_equivalence(&s, *p, *q)))
                .collect();
            match ratios {
                Err(e) => Case::failed(label.clone(), e),
                Ok(r) => {
                    let (lo, hi) = (r.iter().copied().fold(f64::INFINITY, f64::min), r.iter().copied().fold(0.0, f64::max));
                    let spread = if lo > 0.0 { (hi - lo) / lo } else { f64::INFINITY };
                    let mut c = Case::new(label.clone()).metric("min_ratio", lo).metric("max_ratio", hi).metric("drift", spread);
                    for (n, v) in lengths.iter().zip(&r) {
                        c = c.metric(&format!("ratio_{n}"), *v);
                    }
                    c.pass = lo >= low && hi <= high && spread < max_drift;
                    c
                }
            }
        })
        .collect();
    let lo = cases.iter().filter_map(|c| c.metrics.get("min_ratio")).copied().fold(f64::INFINITY, f64::min);
    let hi = cases.iter().filter_map(|c| c.metrics.get("max_ratio")).copied().fold(0.0, f64::max);
    let d = cases.iter().filter_map(|c| c.metrics.get("drift")).copied().fold(0.0, f64::max);
    let checks = vec![at_least("min_ratio", lo, low), at_most("max_ratio", hi, high), at_most("max_drift", d, max_drift)];
    Ok(SuiteReport::new(Suite::Lpq, cfg, hi, checks, cases))
}

/// Synthesized kernels of the nonlinear suite: planted `B^alpha_{p,p}`
/// coefficients with `alpha = 1/p - 1/2`, finest level fixed so that grid
/// refinement leaves the field unchanged.
pub fn nonlinear_kernel(p: f64, seed: u64, levels: u32) -> CoreResult<SampledKernel> {
    let spec = KernelSpec::new(KernelFamily::WaveletSynthetic)
        .with("alpha", 1.0 / p - 0.5)
        .with("p", p)
        .with("max_level", CORPUS_MAX_LEVEL as f64)
        .seeded(seed);
    let g = DyadicGrid::unit(levels);
    let mut k = sample_builtin(&spec, &g, &g)?;
    k.label = format!("synthetic:p={}:seed{seed}", num(p));
    Ok(k)
}

/// `A`-quasinorm over `||k||_2 + |k|_B` at `J` and `J + 1`.
fn nonlinear(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (low, high, max_drift) = (threshold("nonlinear", "band_low"), threshold("nonlinear", "band_high"), threshold("nonlinear", "max_drift"));
    let f = cfg.wavelet()?;
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![1.0, 2.0 / 3.0]);
    let jobs: Vec<(f64, u64)> = ps.iter().flat_map(|&p| cfg.seeds.iter().map(move |s| (p, s))).collect();
    let cases: Vec<Case> = jobs
        .par_iter()
        .map(|&(p, s)| {
            let label = format!("synthetic:p={}:seed{s}", num(p));
            let ratios: CoreResult<Vec<f64>> = [cfg.levels, cfg.levels + 1]
                .iter()
                .map(|&j| verify_nonlinear_equivalence(&nonlinear_kernel(p, s, j)?, &f, p).map(|r| r.ratio))
                .collect();
            match ratios {
                Err(e) => Case::failed(label, e),
                Ok(r) => {
                    let d = drift(&r);
                    let mut c = Case::new(label).metric("ratio_coarse", r[0]).metric("ratio_fine", r[1]).metric("drift", d);
                    c.pass = r.iter().all(|&v| v >= low && v <= high) && d < max_drift;
                    c
                }
            }
        })
        .collect();
    let ratios = || cases.iter().flat_map(|c| [c.metrics.get("ratio_coarse"), c.metrics.get("ratio_fine")]).flatten().copied();
    let lo = ratios().fold(f64::INFINITY, f64::min);
    let hi = ratios().fold(0.0, f64::max);
    let d = cases.iter().filter_map(|c| c.metrics.get("drift")).copied().fold(0.0, f64::max);
    let checks = vec![at_least("min_ratio", lo, low), at_most("max_ratio", hi, high), at_most("max_drift", d, max_drift)];
    Ok(SuiteReport::new(Suite::Nonlinear, cfg, hi, checks, cases))
}

/// Grid of the decay experiment.
pub const DECAY_LEVELS: u32 = 8;

/// Planted `alpha = 1` kernel of the decay experiment.
pub fn decay_kernel(seed: u64) -> CoreResult<SampledKernel> {
    let spec = KernelSpec::new(KernelFamily::FractionalRough).with("alpha", 1.0).seeded(seed);
    let g = DyadicGrid::unit(DECAY_LEVELS);
    sample_builtin(&spec, &g, &g)
}

/// Fitted slope of `log mu(n)` over the middle decade.
pub fn decay_exponent(k: &SampledKernel) -> CoreResult<f64> {
    let s = singular_values(&discretize(k))?;
    decay_rate(&s, middle_decade(&s))
}

/// `||Op(k)||_p / (||k||_2 + |k|_B)` over the corpus at `J` and `J + 1`,
/// and the singular value decay of a planted `alpha = 1` kernel.
fn main_embedding(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let max_drift = threshold("main_embedding", "max_drift");
    let max_exponent = threshold("main_embedding", "max_decay_exponent");
    let f = cfg.wavelet()?;
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![1.0, 2.0 / 3.0]);
    let coarse = corpus(cfg.levels)?;
    let fine = corpus(cfg.levels + 1)?;
    let jobs: Vec<(f64, usize)> = ps.iter().flat_map(|&p| (0..coarse.len()).map(move |i| (p, i))).collect();
    let mut cases: Vec<Case> = jobs
        .par_iter()
        .map(|&(p, i)| {
            let label = format!("{}:p={}", coarse[i].label, num(p));
            match (embedding_report(&coarse[i], &f, p), embedding_report(&fine[i], &f, p)) {
                (Ok(a), Ok(b)) => {
                    let d = drift(&[a.ratio, b.ratio]);
                    let mut c = Case::new(label)
                        .metric("ratio_coarse", a.ratio)
                        .metric("ratio_fine", b.ratio)
                        .metric("lhs_fine", b.lhs)
                        .metric("drift", d);
                    c.pass = a.ratio.is_finite() && b.ratio.is_finite();
                    c
                }
                (Err(e), _) | (_, Err(e)) => Case::failed(label, e),
            }
        })
        .collect();
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &p in &ps {
        let tag = format!(":p={}", num(p));
        let max_of = |key: &str| cases.iter().filter(|c| c.label.ends_with(&tag)).filter_map(|c| c.metrics.get(key)).copied().fold(0.0, f64::max);
        let (a, b) = (max_of("ratio_coarse"), max_of("ratio_fine"));
        worst = worst.max(a).max(b);
        checks.push(at_most(format!("max_ratio_drift{tag}"), drift(&[a, b]), max_drift));
    }
    let decay = match decay_kernel(cfg.seed).and_then(|k| decay_exponent(&k)) {
        Ok(e) => {
            checks.push(at_most("decay_exponent", e, max_exponent));
            Case::new(format!("decay:fractional_rough:alpha=1:seed{}", cfg.seed)).metric("exponent", e).metric("predicted", -1.5)
        }
        Err(e) => Case::failed("decay", e),
    };
    cases.push(decay);
    Ok(SuiteReport::new(Suite::MainEmbedding, cfg, worst, checks, cases))
}

/// Soundness of the Schur bounds on the corpus, the constant symbol, and the
/// sampled lower bound against the matrix oracle on `4 x 4` symbols.
fn schur(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let tol = threshold("schur", "tolerance");
    let f = cfg.wavelet()?;
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![0.5, 1.0]);
    let kernels = corpus(cfg.levels)?;
    let jobs: Vec<(f64, &SampledKernel)> = ps.iter().flat_map(|&p| kernels.iter().map(move |k| (p, k))).collect();
    let mut cases: Vec<Case> = jobs
        .par_iter()
        .map(|&(p, k)| {
            let label = format!("{}:p={}", k.label, num(p));
            match besov_schur_estimate(k, &f, p, &cfg.budget, cfg.seed) {
                Err(e) => Case::failed(label, e),
                Ok(r) => {
                    let min_upper = r.upper_bounds.values().copied().fold(f64::INFINITY, f64::min);
                    let mut c = Case::new(label).metric("lower_bound", r.lower_bound).metric("besov_rhs", r.besov_rhs).metric("empirical_constant", r.empirical_constant);
                    for (name, v) in &r.upper_bounds {
                        c = c.metric(&format!("upper_{name}"), *v);
                    }
                    c.pass = r.lower_bound <= min_upper + tol;
                    c
                }
            }
        })
        .collect();
    let mut checks = Vec::new();
    let slack = cases
        .iter()
        .map(|c| {
            let lower = c.metrics.get("lower_bound").copied().unwrap_or(f64::INFINITY);
            let upper = c.metrics.iter().filter(|(k, _)| k.starts_with("upper_")).map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
            lower - upper
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(at_most("lower_minus_upper", slack, tol));

    // Only the Haar filter cancels constants exactly in floating point.
    let g = DyadicGrid::unit(cfg.levels);
    let one = SampledKernel::from_fn(g, g, "constant", |_, _| 1.0)?;
    let haar = WaveletFilter::haar();
    for &p in &ps {
        let r = besov_schur_estimate(&one, &haar, p, &cfg.budget, cfg.seed)?;
        let tag = format!(":p={}", num(p));
        checks.push(at_least(format!("constant_lower{tag}"), r.lower_bound, threshold("schur", "constant_lower")));
        checks.push(equal(format!("constant_rhs{tag}"), r.besov_rhs, 1.0));
    }

    let agreement = threshold("schur", "oracle_agreement");
    let seeds: Vec<u64> = cfg.seeds.iter().collect();
    let oracle_cases: Vec<Case> = seeds
        .par_iter()
        .map(|&s| {
            let label = format!("oracle:4x4:seed{s}");
            let a = random_matrix(s, "schur-oracle-matrix", 4, 4);
            let lower = rank_one_lower_bound(&SchurSymbol::Matrix(a.clone()), 1.0, &cfg.budget, s);
            let oracle = matrix_mp_oracle(&a, 1.0, &cfg.budget, s);
            match (lower, oracle) {
                (Ok(l), Ok(o)) => {
                    let gap = (l.value - o.value).abs() / o.value;
                    let mut c = Case::new(label).metric("lower_bound", l.value).metric("oracle", o.value).metric("gap", gap).metric("stable", if o.stable { 1.0 } else { 0.0 });
                    c.pass = gap <= agreement;
                    c
                }
                (Err(e), _) | (_, Err(e)) => Case::failed(label, e),
            }
        })
        .collect();
    let gap = oracle_cases.iter().filter_map(|c| c.metrics.get("gap")).copied().fold(0.0, f64::max);
    checks.push(at_most("oracle_gap", gap, agreement));
    cases.extend(oracle_cases);
    let worst = cases.iter().filter_map(|c| c.metrics.get("empirical_constant")).copied().fold(0.0, f64::max);
    Ok(SuiteReport::new(Suite::Schur, cfg, worst, checks, cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_measures() {
        assert_eq!(drift(&[2.0, 2.5, 1.5]), 0.25);
        assert_eq!(drift(&[0.0, 1.0]), f64::INFINITY);
        assert!((step_drift(&[1.0, 1.1, 1.21]) - 0.1).abs() < 1e-12);
        assert_eq!(cummin([3.0, 1.0, 2.0].into_iter()), vec![3.0, 1.0, 1.0]);
    }

    #[test]
    fn checks_compare() {
        assert!(at_most("a", 1.0, 1.0).pass);
        assert!(!at_least("a", 0.5, 1.0).pass);
        assert!(equal("a", 1.0, 1.0).pass && !equal("a", 1.0 + f64::EPSILON, 1.0).pass);
    }
}
