use std::path::PathBuf;

use besovop_core::besov_analysis::{
    analyze_kernel, best_n_term_errors, besov_seminorm, coefficient_norms, verify_nonlinear_equivalence, BesovParams, CoeffIndex,
    NonlinearReport, ValueNorm,
};
use besovop_core::dyadic_wavelet::{forward_dwt, inverse_dwt, DyadicGrid, WaveletFilter, MAX_ORDER, MIN_ORDER};
use besovop_core::kernel_model::{kernel_to_string, load_kernel, sample_builtin, synthesize_planted, KernelFamily, KernelSpec, SampledKernel};
use besovop_core::rng;
use besovop_core::schur_mult::{besov_schur_estimate, SchurReport};
use besovop_core::seqspace::{ell_p, NonnegSeq};
use besovop_core::spectral::{decay_rate, discretize, middle_decade, schatten, singular_values};
use rand::Rng;
use serde::Serialize;

use crate::artifacts::{csv_string, loglog_rows, num, OutDir};
use crate::config::{CliError, CliResult, Format, RunConfig};
use crate::thresholds::threshold;

pub struct Outcome {
    pub pass: bool,
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

fn outcome(pass: bool, cfg: &RunConfig, json: String, csv: String, out: &OutDir) -> Outcome {
    let stdout = match cfg.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    Outcome { pass, stdout, files: out.written().to_vec() }
}

#[derive(Serialize)]
struct Residuals {
    sum: f64,
    orthonormality: f64,
    quadrature_mirror: f64,
    moments: f64,
}

#[derive(Serialize)]
struct FilterEntry {
    name: String,
    order: usize,
    taps: usize,
    support_length: usize,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
    residuals: Residuals,
    max_residual: f64,
}

#[derive(Serialize)]
struct FiltersReport<'a> {
    config: &'a RunConfig,
    pass: bool,
    threshold: f64,
    filters: Vec<FilterEntry>,
}

pub fn filters(cfg: &RunConfig) -> CliResult<Outcome> {
    let limit = threshold("filters", "max_residual");
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for order in MIN_ORDER..=MAX_ORDER {
        let f = WaveletFilter::daubechies(order)?;
        let [sum, orthonormality, quadrature_mirror, moments] = f.invariant_residuals();
        for (k, (h, g)) in f.lowpass.iter().zip(&f.highpass).enumerate() {
            rows.push(vec![f.name(), k.to_string(), num(*h), num(*g)]);
        }
        entries.push(FilterEntry {
            name: f.name(),
            order,
            taps: f.taps(),
            support_length: f.support_length(),
            lowpass: f.lowpass.clone(),
            highpass: f.highpass.clone(),
            max_residual: sum.max(orthonormality).max(quadrature_mirror).max(moments),
            residuals: Residuals { sum, orthonormality, quadrature_mirror, moments },
        });
    }
    let pass = entries.iter().all(|e| e.max_residual <= limit);
    let mut out = OutDir::new(&cfg.out)?;
    let json = out.json("filters.json", &FiltersReport { config: cfg, pass, threshold: limit, filters: entries })?;
    let csv = out.csv("filters.csv", &["filter", "k", "lowpass", "highpass"], &rows)?;
    Ok(outcome(pass, cfg, json, csv, &out))
}

/// Family spec from flags: `--alpha` and `--p` become family parameters.
fn kernel_spec(cfg: &RunConfig, family: &str) -> CliResult<KernelSpec> {
    let family: KernelFamily = family.parse()?;
    if family == KernelFamily::File {
        return Err(CliError::Config("family `file` is read with --kernel <path>".into()));
    }
    let mut spec = KernelSpec::new(family);
    spec.params = cfg.params.clone();
    if let Some(a) = cfg.alpha {
        spec.params.insert("alpha".into(), a);
    }
    if let Some(p) = cfg.p {
        spec.params.insert("p".into(), p);
    }
    if family.is_random() {
        spec = spec.seeded(cfg.seed);
    }
    Ok(spec)
}

#[derive(Serialize)]
struct PlantedInfo {
    alpha: f64,
    p: f64,
    filter: String,
    ground_truth: f64,
    coefficients: Vec<(u32, u64, f64)>,
}

struct Input {
    kernel: SampledKernel,
    planted: Option<PlantedInfo>,
}

fn build_input(cfg: &RunConfig) -> CliResult<Input> {
    if let Some(path) = &cfg.kernel {
        let mut kernel = load_kernel(path)?;
        kernel.label = cfg
            .label
            .clone()
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "kernel".into()));
        return Ok(Input { kernel, planted: None });
    }
    let family = cfg.family.as_deref().ok_or_else(|| CliError::Config("one of --kernel or --family is required".into()))?;
    let spec = kernel_spec(cfg, family)?;
    let g = DyadicGrid::unit(cfg.levels);
    let (mut kernel, planted) = if spec.family.is_random() {
        let ps = spec.planted()?;
        let pk = synthesize_planted(&ps, &g, &g)?;
        let info = PlantedInfo {
            alpha: ps.alpha,
            p: ps.p,
            filter: ps.filter.name(),
            ground_truth: pk.ground_truth,
            coefficients: pk.coefficients.iter().map(|c| (c.level, c.shift, c.norm)).collect(),
        };
        (pk.kernel, Some(info))
    } else {
        (sample_builtin(&spec, &g, &g)?, None)
    };
    kernel.label = cfg.label.clone().unwrap_or_else(|| {
        if spec.family.is_random() {
            format!("{}_seed{}", spec.family.name(), cfg.seed)
        } else {
            spec.family.name().to_string()
        }
    });
    Ok(Input { kernel, planted })
}

#[derive(Serialize)]
struct TruthReport<'a> {
    config: &'a RunConfig,
    label: &'a str,
    family: &'a str,
    levels: u32,
    l2_norm: f64,
    sup_norm: f64,
    /// Planted Besov seminorm `B^alpha_{p,p}(L2)`; absent for analytic families.
    planted: Option<&'a PlantedInfo>,
}

pub fn synth(cfg: &RunConfig) -> CliResult<Outcome> {
    let family = cfg.family.clone().ok_or_else(|| CliError::Config("synth needs --family".into()))?;
    let input = build_input(cfg)?;
    let k = &input.kernel;
    let mut out = OutDir::new(&cfg.out)?;
    out.write(&format!("{}.kernel", k.label), &kernel_to_string(k))?;
    let report = TruthReport {
        config: cfg,
        label: &k.label,
        family: &family,
        levels: cfg.levels,
        l2_norm: k.l2_norm(),
        sup_norm: k.sup_norm(),
        planted: input.planted.as_ref(),
    };
    let json = out.json(&format!("{}.truth.json", k.label), &report)?;
    let rows: Vec<Vec<String>> = input
        .planted
        .iter()
        .flat_map(|p| &p.coefficients)
        .map(|&(j, s, n)| vec![j.to_string(), s.to_string(), num(n)])
        .collect();
    let csv = csv_string(&["j", "k", "norm"], &rows);
    Ok(outcome(true, cfg, json, csv, &out))
}

#[derive(Serialize)]
struct DwtReport<'a> {
    config: &'a RunConfig,
    source: String,
    length: usize,
    signal_norm: f64,
    parseval_error: f64,
    round_trip_error: f64,
    threshold: f64,
    pass: bool,
}

fn read_signal(path: &std::path::Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|_| CliError::Config(format!("file not found: {}", path.display())))?;
    text.split_whitespace()
        .enumerate()
        .map(|(i, t)| t.parse::<f64>().map_err(|_| CliError::Runtime(format!("{}: value {} (`{t}`) is not a number", path.display(), i + 1))))
        .collect()
}

pub fn dwt(cfg: &RunConfig) -> CliResult<Outcome> {
    let f = cfg.wavelet()?;
    let (x, source) = match &cfg.input {
        Some(p) => (read_signal(p)?, p.display().to_string()),
        None => {
            let mut r = rng::task_rng(cfg.seed, "dwt-signal");
            ((0..1usize << cfg.levels).map(|_| r.gen_range(-1.0..1.0)).collect(), format!("uniform:seed{}", cfg.seed))
        }
    };
    let pyr = forward_dwt(&x, &f, 0)?;
    let back = inverse_dwt(&pyr, &f)?;
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let parseval_error = (pyr.energy().sqrt() - norm).abs() / scale;
    let round_trip_error = back.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / scale;
    let limit = threshold("dwt", "max_relative_error");
    let pass = parseval_error <= limit && round_trip_error <= limit;

    let mut rows: Vec<Vec<String>> =
        pyr.scaling.iter().enumerate().map(|(k, v)| vec!["scaling".into(), pyr.coarsest_level.to_string(), k.to_string(), num(*v)]).collect();
    for level in pyr.coarsest_level..pyr.levels() {
        for (k, v) in pyr.detail(level).unwrap_or(&[]).iter().enumerate() {
            rows.push(vec!["detail".into(), level.to_string(), k.to_string(), num(*v)]);
        }
    }
    let mut out = OutDir::new(&cfg.out)?;
    let csv = out.csv("dwt.csv", &["band", "level", "shift", "value"], &rows)?;
    let json = out.json(
        "dwt.json",
        &DwtReport { config: cfg, source, length: x.len(), signal_norm: norm, parseval_error, round_trip_error, threshold: limit, pass },
    )?;
    Ok(outcome(pass, cfg, json, csv, &out))
}

#[derive(Serialize)]
struct LevelSummary {
    level: u32,
    count: usize,
    lp_norm: f64,
    max_norm: f64,
}

#[derive(Serialize)]
struct BesovSettings {
    s: f64,
    p: f64,
    #[serde(serialize_with = "inf_as_text")]
    q: f64,
    value_norm: &'static str,
}

fn inf_as_text<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Serialize)]
struct BesovReport<'a> {
    config: &'a RunConfig,
    label: &'a str,
    filter: String,
    params: BesovSettings,
    seminorm: f64,
    l2_norm: f64,
    levels: Vec<LevelSummary>,
    nonlinear: Option<NonlinearReport>,
    planted: Option<&'a PlantedInfo>,
}

pub fn besov(cfg: &RunConfig) -> CliResult<Outcome> {
    let f = cfg.wavelet()?;
    let input = build_input(cfg)?;
    let k = &input.kernel;
    let p = cfg.p.unwrap_or(1.0);
    let q = cfg.q.unwrap_or(p);
    let s = cfg.alpha.unwrap_or(1.0 / p - 0.5);
    let params = BesovParams::new(s, p, q, ValueNorm::L2)?;
    let field = analyze_kernel(k, &f, 0)?;
    let seminorm = besov_seminorm(&field, &params)?;
    let norms = coefficient_norms(&field, ValueNorm::L2);

    let mut rows = Vec::new();
    let mut per_level: Vec<(u32, Vec<f64>)> = Vec::new();
    for (idx, n) in &norms {
        if let CoeffIndex::Detail { level, shift } = *idx {
            rows.push(vec![level.to_string(), shift.to_string(), num(*n)]);
            match per_level.last_mut() {
                Some((l, v)) if *l == level => v.push(*n),
                _ => per_level.push((level, vec![*n])),
            }
        }
    }
    let levels = per_level
        .into_iter()
        .map(|(level, v)| {
            Ok(LevelSummary {
                level,
                count: v.len(),
                max_norm: v.iter().copied().fold(0.0, f64::max),
                lp_norm: ell_p(&NonnegSeq::from_abs(v), p)?,
            })
        })
        .collect::<besovop_core::error::Result<Vec<_>>>()?;
    let nonlinear = if p < 2.0 && !k.is_zero() { Some(verify_nonlinear_equivalence(k, &f, p)?) } else { None };

    let errors = best_n_term_errors(&field);
    let approx_rows: Vec<Vec<String>> = errors.as_slice().iter().enumerate().map(|(n, e)| vec![n.to_string(), num(*e)]).collect();
    let loglog = loglog_rows(errors.as_slice().iter().enumerate().skip(1).map(|(n, e)| (n as f64, *e)));

    let mut out = OutDir::new(&cfg.out)?;
    let csv = out.csv("coeffs.csv", &["j", "k", "norm"], &rows)?;
    out.csv("approx.csv", &["n", "error"], &approx_rows)?;
    out.csv("approx_loglog.csv", &["log10_n", "log10_error"], &loglog)?;
    let report = BesovReport {
        config: cfg,
        label: &k.label,
        filter: f.name(),
        params: BesovSettings { s, p, q, value_norm: "l2" },
        seminorm,
        l2_norm: k.l2_norm(),
        levels,
        nonlinear,
        planted: input.planted.as_ref(),
    };
    let json = out.json("besov.json", &report)?;
    Ok(outcome(true, cfg, json, csv, &out))
}

#[derive(Serialize)]
struct DecayReport<'a> {
    config: &'a RunConfig,
    label: &'a str,
    length: usize,
    rank: usize,
    frobenius: f64,
    fit_range: [usize; 2],
    exponent: Option<f64>,
    fit_error: Option<String>,
    /// `-(alpha + 1/2)` for a planted smoothness `alpha`.
    predicted_exponent: Option<f64>,
    schatten: Option<(f64, f64)>,
}

pub fn spectrum(cfg: &RunConfig) -> CliResult<Outcome> {
    let input = build_input(cfg)?;
    let k = &input.kernel;
    let op = discretize(k);
    let spec = singular_values(&op)?;
    let range = middle_decade(&spec);
    let (exponent, fit_error) = match decay_rate(&spec, range.clone()) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let alpha = input.planted.as_ref().map(|p| p.alpha).or(cfg.alpha);
    let schatten_p = match cfg.p {
        Some(p) => Some((p, schatten(&spec, p)?)),
        None => None,
    };
    let rows: Vec<Vec<String>> = spec.values().iter().enumerate().map(|(n, m)| vec![n.to_string(), num(*m)]).collect();
    let loglog = loglog_rows(spec.values().iter().take(spec.numerical_rank()).enumerate().map(|(n, m)| ((n + 1) as f64, *m)));

    let mut out = OutDir::new(&cfg.out)?;
    let csv = out.csv("spectrum.csv", &["n", "mu"], &rows)?;
    out.csv("spectrum_loglog.csv", &["log10_n_plus_1", "log10_mu"], &loglog)?;
    let report = DecayReport {
        config: cfg,
        label: &k.label,
        length: spec.len(),
        rank: spec.numerical_rank(),
        frobenius: op.frobenius(),
        fit_range: [range.start, range.end],
        exponent,
        fit_error,
        predicted_exponent: alpha.map(|a| -(a + 0.5)),
        schatten: schatten_p,
    };
    let json = out.json("decay.json", &report)?;
    Ok(outcome(true, cfg, json, csv, &out))
}

#[derive(Serialize)]
struct SchurOutput<'a> {
    config: &'a RunConfig,
    filter: String,
    report: &'a SchurReport,
}

pub fn schur(cfg: &RunConfig) -> CliResult<Outcome> {
    let f = cfg.wavelet()?;
    let input = build_input(cfg)?;
    let p = cfg.p.unwrap_or(1.0);
    let report = besov_schur_estimate(&input.kernel, &f, p, &cfg.budget, cfg.seed)?;
    let mut rows = Vec::new();
    for (name, v) in [("xi", &report.witnesses.xi), ("eta", &report.witnesses.eta)] {
        rows.extend(v.iter().enumerate().map(|(i, x)| vec![name.to_string(), i.to_string(), num(*x)]));
    }
    let mut out = OutDir::new(&cfg.out)?;
    out.csv("witnesses.csv", &["vector", "index", "value"], &rows)?;
    let json = out.json("schur.json", &SchurOutput { config: cfg, filter: f.name(), report: &report })?;
    let mut bounds = vec![vec!["lower_bound".to_string(), num(report.lower_bound)], vec!["besov_rhs".into(), num(report.besov_rhs)]];
    bounds.extend(report.upper_bounds.iter().map(|(k, v)| vec![format!("upper_{k}"), num(*v)]));
    let csv = csv_string(&["quantity", "value"], &bounds);
    Ok(outcome(report.consistent, cfg, json, csv, &out))
}
