//! Flags, config files and the resolved run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use besovop_core::dyadic_wavelet::WaveletFilter;
use besovop_core::kernel_model::CORPUS_MAX_LEVEL;
use besovop_core::schur_mult::SearchBudget;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or inputs; exit code 2.
    Config(String),
    /// Computation or I/O failure; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<besovop_core::error::Error> for CliError {
    fn from(e: besovop_core::error::Error) -> Self {
        use besovop_core::error::Error::*;
        match e {
            UnsupportedOrder { .. }
            | InvalidExponent { .. }
            | UnknownFamily(_)
            | ParameterMissing(_)
            | ParameterOutOfRange { .. }
            | FileNotFound(_)
            | InvalidBesovParams(_)
            | ScaleRangeTooSmall => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Hardy,
    MuEstimate,
    Lpq,
    Nonlinear,
    MainEmbedding,
    Schur,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Hardy => "hardy",
            Suite::MuEstimate => "mu_estimate",
            Suite::Lpq => "lpq",
            Suite::Nonlinear => "nonlinear",
            Suite::MainEmbedding => "main_embedding",
            Suite::Schur => "schur",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the supported filters with their invariant residuals.
    Filters,
    /// Sample a kernel family and write the kernel file and its ground truth.
    Synth,
    /// Periodised DWT of a signal file or a seeded random signal.
    Dwt,
    /// Wavelet coefficient field and Besov seminorm of a kernel.
    Besov,
    /// Singular values of the discretised operator and their decay.
    Spectrum,
    /// Lower and upper bounds of the Schur multiplier quasinorm.
    Schur,
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Filters => "filters",
            Command::Synth => "synth",
            Command::Dwt => "dwt",
            Command::Besov => "besov",
            Command::Spectrum => "spectrum",
            Command::Schur => "schur",
            Command::Verify { .. } => "verify",
        }
    }

    fn default_levels(self) -> u32 {
        match self {
            Command::Dwt => 10,
            Command::Schur => 6,
            Command::Verify { suite } => match suite {
                Suite::Nonlinear | Suite::MainEmbedding => 7,
                Suite::MuEstimate => 6,
                Suite::Schur => 5,
                Suite::Hardy | Suite::Lpq => 12,
            },
            _ => 8,
        }
    }

    /// The corpus and the synthesized kernels plant detail up to level
    /// `CORPUS_MAX_LEVEL`; the Hardy suite doubles from `2^8`.
    fn min_levels(self) -> u32 {
        match self {
            Command::Verify { suite: Suite::Hardy } => 9,
            Command::Verify { suite: Suite::MuEstimate | Suite::Nonlinear | Suite::MainEmbedding | Suite::Schur } => {
                CORPUS_MAX_LEVEL
            }
            _ => 1,
        }
    }

    fn max_levels(self) -> u32 {
        match self {
            Command::Dwt => 20,
            Command::Verify { suite: Suite::Hardy | Suite::Lpq } => 16,
            _ => 10,
        }
    }

    fn default_seeds(self) -> SeedRange {
        let last = match self {
            Command::Verify { suite: Suite::MuEstimate } => 100,
            Command::Verify { suite: Suite::Hardy | Suite::Schur } => 20,
            _ => 10,
        };
        SeedRange { first: 1, last }
    }
}

#[derive(Debug, Parser)]
#[command(name = "besovop", version, about = "Wavelet, Schatten-class and Schur multiplier experiments on sampled kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid levels: kernels are sampled on 2^J x 2^J points.
    #[arg(short = 'J', long = "levels", global = true)]
    pub levels: Option<u32>,
    /// `haar` or `daubechies:N`.
    #[arg(long, global = true)]
    pub filter: Option<String>,
    #[arg(long = "p", global = true)]
    pub p: Option<f64>,
    /// Accepts `inf`.
    #[arg(long = "q", global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Kernel file to analyse instead of a sampled family.
    #[arg(long, global = true)]
    pub kernel: Option<PathBuf>,
    /// Signal file for `dwt`: whitespace separated values.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Family parameter, repeatable.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Seed range `a..b` (inclusive) or a single seed.
    #[arg(long, global = true)]
    pub seeds: Option<String>,
    /// Matrix size of the seeded spectra.
    #[arg(short = 'n', long = "size", global = true)]
    pub size: Option<usize>,
    /// Hardy profile: geometric, power or seeded.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    #[arg(long, global = true)]
    pub label: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long = "ascent-steps", global = true)]
    pub ascent_steps: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
}

/// Same keys as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    levels: Option<u32>,
    filter: Option<String>,
    p: Option<f64>,
    #[serde(default, deserialize_with = "exponent_from_json")]
    q: Option<f64>,
    alpha: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    family: Option<String>,
    kernel: Option<PathBuf>,
    input: Option<PathBuf>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    seeds: Option<String>,
    size: Option<usize>,
    profile: Option<String>,
    label: Option<String>,
    samples: Option<usize>,
    ascent_steps: Option<usize>,
    restarts: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonExponent {
    Number(f64),
    Text(String),
}

fn exponent_from_json<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<JsonExponent>::deserialize(d)? {
        None => Ok(None),
        Some(JsonExponent::Number(v)) => Ok(Some(v)),
        Some(JsonExponent::Text(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

/// Finite values as numbers, infinity as `"inf"`.
fn exponent_to_json<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn parse(s: &str) -> CliResult<Self> {
        let bad = || CliError::Config(format!("cannot parse seed range `{s}`, expected `a..b` or a single seed"));
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v = s.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if first > last {
            return Err(bad());
        }
        Ok(Self { first, last })
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.first..=self.last
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub suite: Option<String>,
    pub seed: u64,
    pub levels: u32,
    pub filter: String,
    pub p: Option<f64>,
    #[serde(serialize_with = "exponent_to_json")]
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
    pub family: Option<String>,
    pub kernel: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub params: BTreeMap<String, f64>,
    pub seeds: SeedRange,
    pub size: usize,
    pub profile: Option<String>,
    pub label: Option<String>,
    pub budget: SearchBudget,
}

fn parse_param(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("parameter `{s}` is not NAME=VALUE")))?;
    let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("parameter `{k}` has a non-numeric value `{v}`")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("parameter `{k}` must be finite")));
    }
    Ok((k.trim().to_string(), v))
}

fn positive(name: &str, v: Option<f64>) -> CliResult<()> {
    match v {
        Some(x) if !(x > 0.0) => Err(CliError::Config(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, flags: &Flags) -> CliResult<Self> {
        let file = match &flags.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
            }
        };
        let mut params = file.params;
        for p in &flags.params {
            let (k, v) = parse_param(p)?;
            params.insert(k, v);
        }
        let seeds = match flags.seeds.clone().or(file.seeds) {
            Some(s) => SeedRange::parse(&s)?,
            None => command.default_seeds(),
        };
        let defaults = SearchBudget::default();
        let cfg = RunConfig {
            command: command.name().to_string(),
            suite: match command {
                Command::Verify { suite } => Some(suite.name().to_string()),
                _ => None,
            },
            seed: flags.seed.or(file.seed).unwrap_or(1),
            levels: flags.levels.or(file.levels).unwrap_or(command.default_levels()),
            filter: flags.filter.clone().or(file.filter).unwrap_or_else(|| "daubechies:3".into()),
            p: flags.p.or(file.p),
            q: flags.q.or(file.q),
            alpha: flags.alpha.or(file.alpha),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("besovop-out")),
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            family: flags.family.clone().or(file.family),
            kernel: flags.kernel.clone().or(file.kernel),
            input: flags.input.clone().or(file.input),
            params,
            seeds,
            size: flags.size.or(file.size).unwrap_or(32),
            profile: flags.profile.clone().or(file.profile),
            label: flags.label.clone().or(file.label),
            budget: SearchBudget {
                samples: flags.samples.or(file.samples).unwrap_or(defaults.samples),
                ascent_steps: flags.ascent_steps.or(file.ascent_steps).unwrap_or(defaults.ascent_steps),
                restarts: flags.restarts.or(file.restarts).unwrap_or(defaults.restarts),
            },
        };
        cfg.validate(command)?;
        Ok(cfg)
    }

    fn validate(&self, command: Command) -> CliResult<()> {
        let (min, max) = (command.min_levels(), command.max_levels());
        if self.levels < min || self.levels > max {
            return Err(CliError::Config(format!("-J must lie in {min}..={max} for {}, got {}", command.name(), self.levels)));
        }
        self.wavelet()?;
        positive("p", self.p)?;
        positive("q", self.q)?;
        positive("alpha", self.alpha)?;
        if self.size < 3 || self.size > 512 {
            return Err(CliError::Config(format!("-n must lie in 3..=512, got {}", self.size)));
        }
        if let Some(p) = &self.profile {
            if !["geometric", "power", "seeded"].contains(&p.as_str()) {
                return Err(CliError::Config(format!("unknown profile `{p}` (geometric, power, seeded)")));
            }
        }
        if let Some(l) = &self.label {
            if l.is_empty() || l.contains(['/', '\\']) {
                return Err(CliError::Config(format!("label `{l}` cannot be used as a file name")));
            }
        }
        Ok(())
    }

    pub fn wavelet(&self) -> CliResult<WaveletFilter> {
        WaveletFilter::from_name(&self.filter).map_err(|e| CliError::Config(e.to_string()))
    }
}
