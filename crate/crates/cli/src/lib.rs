//! Command-line front end: flag resolution, commands, verification suites.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod suites;
pub mod thresholds;

use commands::Outcome;
use config::{Cli, CliError, CliResult, Command, Format, RunConfig};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "BESOVOP_THREADS";

/// Sizes the global rayon pool from `BESOVOP_THREADS`, if set.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    // A pool built earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    init_threads()?;
    let cfg = RunConfig::resolve(cli.command, &cli.flags)?;
    match cli.command {
        Command::Filters => commands::filters(&cfg),
        Command::Synth => commands::synth(&cfg),
        Command::Dwt => commands::dwt(&cfg),
        Command::Besov => commands::besov(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Schur => commands::schur(&cfg),
        Command::Verify { suite } => verify(suite, &cfg),
    }
}

#[derive(serde::Serialize)]
struct PartialReport<'a> {
    suite: &'static str,
    pass: bool,
    error: String,
    config: &'a RunConfig,
}

fn verify(suite: config::Suite, cfg: &RunConfig) -> CliResult<Outcome> {
    let mut out = artifacts::OutDir::new(&cfg.out)?;
    let report = match suites::run(suite, cfg) {
        Ok(r) => r,
        Err(e) => {
            if let CliError::Runtime(msg) = &e {
                let partial = PartialReport { suite: suite.name(), pass: false, error: msg.clone(), config: cfg };
                out.json(&format!("{}.json", suite.name()), &partial)?;
            }
            return Err(e);
        }
    };
    let json = out.json(&format!("{}.json", suite.name()), &report)?;
    let csv = out.csv(&format!("{}.csv", suite.name()), &suites::CSV_HEADER, &report.csv_rows())?;
    let stdout = match cfg.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    Ok(Outcome { pass: report.pass, stdout, files: out.written().to_vec() })
}
