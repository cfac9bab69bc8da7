//! Pass/fail thresholds of every verification suite.
//!
//! | suite            | name                | value   | meaning |
//! |------------------|---------------------|---------|---------|
//! | filters          | max_residual        | 1e-12   | largest filter invariant residual |
//! | dwt              | max_relative_error  | 1e-10   | round trip and Parseval, relative to the signal norm |
//! | transform        | annihilation        | 1e-8    | interior details of polynomials of degree < N, relative |
//! | hilbert_schmidt  | frobenius           | 1e-12   | Frobenius norm vs grid L2 norm, relative |
//! | greedy           | exhaustive_gap      | 1e-12   | greedy vs best-subset n-term error |
//! | hardy            | max_drift           | 0.20    | ratio change per length doubling |
//! | mu_estimate      | max_ratio           | 1       | `mu(2n) sqrt(n) / e(n)`, no tolerance |
//! | lpq              | band_low            | 0.1     | smallest admissible equivalence ratio |
//! | lpq              | band_high           | 10      | largest admissible equivalence ratio |
//! | lpq              | max_drift           | 0.25    | spread of the ratio over lengths 2^8..2^12 |
//! | nonlinear        | band_low            | 0.1     | smallest admissible ratio |
//! | nonlinear        | band_high           | 10      | largest admissible ratio |
//! | nonlinear        | max_drift           | 0.30    | ratio change from J to J+1 |
//! | main_embedding   | max_drift           | 0.30    | change of the largest ratio from J to J+1 |
//! | main_embedding   | max_decay_exponent  | -1.35   | fitted singular value slope, planted alpha = 1 |
//! | schur            | tolerance           | 1e-6    | slack in lower bound <= upper bound |
//! | schur            | constant_lower      | 0.999   | lower bound of the constant symbol |
//! | schur            | oracle_agreement    | 0.05    | sampled lower bound vs matrix oracle, relative |

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub suite: &'static str,
    pub name: &'static str,
    pub value: f64,
    pub meaning: &'static str,
}

const fn t(suite: &'static str, name: &'static str, value: f64, meaning: &'static str) -> Threshold {
    Threshold { suite, name, value, meaning }
}

pub const THRESHOLDS: &[Threshold] = &[
    t("filters", "max_residual", 1e-12, "largest filter invariant residual"),
    t("dwt", "max_relative_error", 1e-10, "round trip and Parseval, relative to the signal norm"),
    t("transform", "annihilation", 1e-8, "interior details of polynomials of degree < N, relative"),
    t("hilbert_schmidt", "frobenius", 1e-12, "Frobenius norm vs grid L2 norm, relative"),
    t("greedy", "exhaustive_gap", 1e-12, "greedy vs best-subset n-term error"),
    t("hardy", "max_drift", 0.20, "ratio change per length doubling"),
    t("mu_estimate", "max_ratio", 1.0, "mu(2n) sqrt(n) / e(n), no tolerance"),
    t("lpq", "band_low", 0.1, "smallest admissible equivalence ratio"),
    t("lpq", "band_high", 10.0, "largest admissible equivalence ratio"),
    t("lpq", "max_drift", 0.25, "spread of the ratio over lengths 2^8..2^12"),
    t("nonlinear", "band_low", 0.1, "smallest admissible ratio"),
    t("nonlinear", "band_high", 10.0, "largest admissible ratio"),
    t("nonlinear", "max_drift", 0.30, "ratio change from J to J+1"),
    t("main_embedding", "max_drift", 0.30, "change of the largest ratio from J to J+1"),
    t("main_embedding", "max_decay_exponent", -1.35, "fitted singular value slope, planted alpha = 1"),
    t("schur", "tolerance", 1e-6, "slack in lower bound <= upper bound"),
    t("schur", "constant_lower", 0.999, "lower bound of the constant symbol"),
    t("schur", "oracle_agreement", 0.05, "sampled lower bound vs matrix oracle, relative"),
];

/// Looks up a threshold; unknown names are a programming error.
pub fn threshold(suite: &str, name: &str) -> f64 {
    THRESHOLDS
        .iter()
        .find(|t| t.suite == suite && t.name == name)
        .unwrap_or_else(|| panic!("no threshold {suite}.{name}"))
        .value
}

pub fn for_suite(suite: &str) -> Vec<Threshold> {
    THRESHOLDS.iter().filter(|t| t.suite == suite).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (i, a) in THRESHOLDS.iter().enumerate() {
            assert!(THRESHOLDS[i + 1..].iter().all(|b| (a.suite, a.name) != (b.suite, b.name)));
        }
    }

    #[test]
    fn doc_table_matches() {
        let src = include_str!("thresholds.rs");
        for t in THRESHOLDS {
            let row = src.lines().find(|l| l.starts_with("//! |") && l.contains(&format!(" {} ", t.suite)) && l.contains(&format!(" {} ", t.name)));
            assert!(row.is_some(), "{}.{} missing from the table", t.suite, t.name);
        }
    }
}
