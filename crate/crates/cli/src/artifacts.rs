//! Deterministic JSON and CSV writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{CliError, CliResult};

pub fn json_string(value: &impl Serialize) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip decimal; `inf`, `-inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:?}")
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

/// Output directory; created on first use.
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn new(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<String> {
        let s = json_string(value)?;
        self.write(name, &s)?;
        Ok(s)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
        let s = csv_string(header, rows);
        self.write(name, &s)?;
        Ok(s)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// `(log10 x, log10 y)` rows for positive pairs.
pub fn loglog_rows(points: impl IntoIterator<Item = (f64, f64)>) -> Vec<Vec<String>> {
    points
        .into_iter()
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| vec![num(x.log10()), num(y.log10())])
        .collect()
}
