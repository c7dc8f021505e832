//! Wavelet-domain artifact removal for EEG-like signals.
//!
//! The crate provides:
//!
//! * a decimated multilevel wavelet transform ([`wavelet`]),
//! * artifact removal by quantile normalization of coefficient amplitudes
//!   toward a clean reference distribution ([`wqn`]),
//! * classic threshold-based denoisers used as baselines ([`thresholding`]),
//! * synthetic signal and artifact generators ([`simulate`]),
//! * evaluation metrics: mean squared error, Wasserstein distance between
//!   coefficient distributions, spectral estimates and scaling exponents,
//!   generalized Gaussian fits ([`metrics`]),
//! * a reproducible benchmark harness tying the above together ([`bench`]).

pub mod bench;
pub mod error;
pub mod metrics;
pub mod signal;
pub mod simulate;
pub mod stats;
pub mod thresholding;
pub mod wavelet;
pub mod wqn;

pub use error::{Error, Result};
pub use signal::Signal;
pub use wavelet::{
    decompose, default_levels, reconstruct, Boundary, Family, WaveletDecomposition, WaveletSpec,
};
