//! Python module `besovop`: filters, transforms, kernels, Besov seminorms,
//! spectra and Schur multiplier bounds.

use std::collections::BTreeMap;

use besovop_core::besov_analysis::{analyze_kernel, best_n_term_errors, besov_seminorm as seminorm, verify_nonlinear_equivalence, BesovParams, ValueNorm};
use besovop_core::dyadic_wavelet::{forward_dwt as dwt, inverse_dwt as idwt, DyadicGrid, Normalization, WaveletFilter, WaveletPyramid};
use besovop_core::kernel_model::{corpus as kernel_corpus, load_kernel, sample_builtin, write_kernel, KernelSpec, SampledKernel};
use besovop_core::schur_mult::{besov_schur_estimate, SearchBudget};
use besovop_core::seqspace::{hardy_check as hardy, lorentz_pq, NonnegSeq};
use besovop_core::spectral::{decay_rate, discretize, embedding_report, middle_decade, schatten as schatten_norm, singular_values as sigma};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: besovop_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn filter(name: &str) -> PyResult<WaveletFilter> {
    WaveletFilter::from_name(name).map_err(err)
}

/// Orthonormal Daubechies filter pair.
#[pyclass(name = "Filter", module = "besovop", frozen)]
struct PyFilter {
    inner: WaveletFilter,
}

#[pymethods]
impl PyFilter {
    /// `"haar"` or `"daubechies:N"` with `N` in `1..=10`.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Self { inner: filter(name)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order
    }

    #[getter]
    fn lowpass(&self) -> Vec<f64> {
        self.inner.lowpass.clone()
    }

    #[getter]
    fn highpass(&self) -> Vec<f64> {
        self.inner.highpass.clone()
    }

    /// `(sum, orthonormality, quadrature_mirror, moments)` residuals.
    fn residuals(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.inner.invariant_residuals();
        (a, b, c, d)
    }

    fn __repr__(&self) -> String {
        format!("Filter('{}')", self.inner.name())
    }
}

/// Periodised DWT: `(scaling, [detail level coarsest, ..., finest])`.
#[pyfunction]
#[pyo3(signature = (samples, filter_name = "daubechies:3", coarsest_level = 0))]
fn forward_dwt(samples: Vec<f64>, filter_name: &str, coarsest_level: u32) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = dwt(&samples, &filter(filter_name)?, coarsest_level).map_err(err)?;
    Ok((p.scaling, p.details))
}

#[pyfunction]
#[pyo3(signature = (scaling, details, filter_name = "daubechies:3"))]
fn inverse_dwt(scaling: Vec<f64>, details: Vec<Vec<f64>>, filter_name: &str) -> PyResult<Vec<f64>> {
    let coarsest_level = scaling.len().max(1).trailing_zeros();
    let p = WaveletPyramid { coarsest_level, scaling, details, normalization: Normalization::Discrete };
    idwt(&p, &filter(filter_name)?).map_err(err)
}

/// Kernel sampled on a dyadic grid, rows indexed by `x`.
#[pyclass(name = "Kernel", module = "besovop", frozen)]
struct PyKernel {
    inner: SampledKernel,
}

#[pymethods]
impl PyKernel {
    /// Samples a named family on the unit grid with `2^levels` points per axis.
    #[staticmethod]
    #[pyo3(signature = (family, levels, params = None, seed = None))]
    fn family(family: &str, levels: u32, params: Option<BTreeMap<String, f64>>, seed: Option<u64>) -> PyResult<Self> {
        let mut spec = KernelSpec::new(family.parse().map_err(err)?);
        spec.params = params.unwrap_or_default();
        if let Some(s) = seed {
            spec = spec.seeded(s);
        }
        let g = DyadicGrid::unit(levels);
        let mut inner = sample_builtin(&spec, &g, &g).map_err(err)?;
        inner.label = family.to_string();
        Ok(Self { inner })
    }

    /// Kernel from a square list of rows sampled on `[start, end)^2`.
    #[staticmethod]
    #[pyo3(signature = (rows, start = 0.0, end = 1.0, label = "kernel"))]
    fn from_rows(rows: Vec<Vec<f64>>, start: f64, end: f64, label: &str) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows must form a square array"));
        }
        let levels = besovop_core::dyadic_wavelet::log2_exact(n).map_err(err)?;
        let g = DyadicGrid::new(levels, start, end).map_err(err)?;
        let inner = SampledKernel::new(g, g, rows.concat(), label).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: load_kernel(path).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        write_kernel(&self.inner, path).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }

    fn __repr__(&self) -> String {
        format!("Kernel('{}', {}x{})", self.inner.label, self.inner.rows(), self.inner.cols())
    }
}

/// `|k|_{B^s_{p,q}(L2)}` from the calibrated wavelet coefficients.
#[pyfunction]
#[pyo3(signature = (kernel, s, p, q = None, filter_name = "daubechies:3"))]
fn besov_seminorm(kernel: &PyKernel, s: f64, p: f64, q: Option<f64>, filter_name: &str) -> PyResult<f64> {
    let field = analyze_kernel(&kernel.inner, &filter(filter_name)?, 0).map_err(err)?;
    let params = BesovParams::new(s, p, q.unwrap_or(p), ValueNorm::L2).map_err(err)?;
    seminorm(&field, &params).map_err(err)
}

/// Best n-term errors `E_0, E_1, ...` of the coefficient field.
#[pyfunction]
#[pyo3(signature = (kernel, filter_name = "daubechies:3"))]
fn n_term_errors(kernel: &PyKernel, filter_name: &str) -> PyResult<Vec<f64>> {
    let field = analyze_kernel(&kernel.inner, &filter(filter_name)?, 0).map_err(err)?;
    Ok(best_n_term_errors(&field).into_vec())
}

#[pyfunction]
#[pyo3(signature = (kernel, p, filter_name = "daubechies:3"))]
fn nonlinear_equivalence<'py>(py: Python<'py>, kernel: &PyKernel, p: f64, filter_name: &str) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &verify_nonlinear_equivalence(&kernel.inner, &filter(filter_name)?, p).map_err(err)?)
}

/// Singular values of the discretised operator, nonincreasing.
#[pyfunction]
fn singular_values(kernel: &PyKernel) -> PyResult<Vec<f64>> {
    Ok(sigma(&discretize(&kernel.inner)).map_err(err)?.values().to_vec())
}

#[pyfunction]
fn schatten(kernel: &PyKernel, p: f64) -> PyResult<f64> {
    let s = sigma(&discretize(&kernel.inner)).map_err(err)?;
    schatten_norm(&s, p).map_err(err)
}

/// Slope of `log mu(n)` against `log n` over the middle decade.
#[pyfunction]
fn decay_exponent(kernel: &PyKernel) -> PyResult<f64> {
    let s = sigma(&discretize(&kernel.inner)).map_err(err)?;
    decay_rate(&s, middle_decade(&s)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (kernel, p, filter_name = "daubechies:3"))]
fn embedding<'py>(py: Python<'py>, kernel: &PyKernel, p: f64, filter_name: &str) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &embedding_report(&kernel.inner, &filter(filter_name)?, p).map_err(err)?)
}

/// Lower bound, upper bounds and Besov right-hand side of the Schur
/// multiplier quasinorm.
#[pyfunction]
#[pyo3(signature = (kernel, p, filter_name = "daubechies:3", seed = 1, samples = 200, ascent_steps = 50, restarts = 8))]
#[allow(clippy::too_many_arguments)]
fn schur_estimate<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    p: f64,
    filter_name: &str,
    seed: u64,
    samples: usize,
    ascent_steps: usize,
    restarts: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let budget = SearchBudget { samples, ascent_steps, restarts };
    let f = filter(filter_name)?;
    let k = &kernel.inner;
    let report = py.detach(|| besov_schur_estimate(k, &f, p, &budget, seed)).map_err(err)?;
    to_dict(py, &report)
}

/// `||b||_{l_{p,q}}` of the decreasing rearrangement.
#[pyfunction]
fn lorentz_quasinorm(values: Vec<f64>, p: f64, q: f64) -> PyResult<f64> {
    lorentz_pq(&NonnegSeq::new(values).map_err(err)?, p, q).map_err(err)
}

#[pyfunction]
fn hardy_check(values: Vec<f64>, r: f64, mu: f64, s: f64, q: f64) -> PyResult<f64> {
    hardy(&NonnegSeq::new(values).map_err(err)?, r, mu, s, q).map_err(err)
}

/// Reference kernels on the unit grid, sorted by label.
#[pyfunction]
fn corpus(levels: u32) -> PyResult<Vec<PyKernel>> {
    Ok(kernel_corpus(levels).map_err(err)?.into_iter().map(|inner| PyKernel { inner }).collect())
}

#[pymodule]
fn besovop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFilter>()?;
    m.add_class::<PyKernel>()?;
    m.add_function(wrap_pyfunction!(forward_dwt, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_dwt, m)?)?;
    m.add_function(wrap_pyfunction!(besov_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(n_term_errors, m)?)?;
    m.add_function(wrap_pyfunction!(nonlinear_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(schatten, m)?)?;
    m.add_function(wrap_pyfunction!(decay_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(embedding, m)?)?;
    m.add_function(wrap_pyfunction!(schur_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(lorentz_quasinorm, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_check, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}
