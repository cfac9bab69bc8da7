use besovop_core::besov_analysis::{analyze_kernel, besov_seminorm, BesovParams, ValueNorm};
use besovop_core::dyadic_wavelet::{DyadicGrid, WaveletFilter};
use besovop_core::kernel_model::{corpus, load_kernel, synthesize_from_coefficients, write_kernel};
use besovop_core::schur_mult::{besov_schur_estimate, SearchBudget};
use besovop_core::spectral::{discretize, singular_values};

#[test]
fn synthesis_is_recovered_by_analysis() {
    let f = WaveletFilter::daubechies(3).unwrap();
    let g = DyadicGrid::unit(8);
    let (k, truth) = synthesize_from_coefficients(1.0, 1.0, &f, &g, &g, 13).unwrap();
    let field = analyze_kernel(&k, &f, 0).unwrap();
    let got = besov_seminorm(&field, &BesovParams::new(1.0, 1.0, 1.0, ValueNorm::L2).unwrap()).unwrap();
    assert!((got - truth).abs() <= 0.02 * truth, "{got} vs {truth}");
}

#[test]
fn kernel_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for k in corpus(5).unwrap() {
        let path = dir.path().join(format!("{}.kernel", k.label));
        write_kernel(&k, &path).unwrap();
        let back = load_kernel(&path).unwrap();
        assert_eq!(back.values, k.values, "{}", k.label);
        assert_eq!(back.grid_x, k.grid_x);
    }
}

#[test]
fn frobenius_is_grid_l2() {
    for k in corpus(6).unwrap() {
        let op = discretize(&k);
        let s = singular_values(&op).unwrap();
        let from_sigma = s.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((op.frobenius() - k.l2_norm()).abs() <= 1e-12 * k.l2_norm().max(1.0));
        assert!((from_sigma - k.l2_norm()).abs() <= 1e-10 * k.l2_norm().max(1.0), "{}", k.label);
    }
}

#[test]
fn schur_bounds_are_homogeneous() {
    let f = WaveletFilter::daubechies(2).unwrap();
    let budget = SearchBudget { samples: 16, ascent_steps: 10, restarts: 2 };
    let k = corpus(5).unwrap().into_iter().find(|k| k.label == "bump_offset").unwrap();
    let a = besov_schur_estimate(&k, &f, 1.0, &budget, 5).unwrap();
    let b = besov_schur_estimate(&k.scaled(-3.0), &f, 1.0, &budget, 5).unwrap();
    for (name, v) in &a.upper_bounds {
        assert!((b.upper_bounds[name] - 3.0 * v).abs() <= 1e-9 * v, "{name}");
    }
    assert!((b.lower_bound - 3.0 * a.lower_bound).abs() <= 1e-9 * a.lower_bound);
}
