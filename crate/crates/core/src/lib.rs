//! Wavelet machinery for kernels of integral operators: vector-valued Besov
//! semi-quasinorms, n-term approximation, singular-value estimates and
//! Schur-multiplier bounds on discretised kernels.

pub mod besov_analysis;
pub mod dyadic_wavelet;
pub mod error;
pub mod kernel_model;
pub mod rng;
pub mod schur_mult;
pub mod seqspace;
pub mod spectral;

pub use error::{Error, Result};
