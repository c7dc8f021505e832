//! Uniformly sampled single-channel signal.

use crate::error::{invalid_input, Result};
use crate::stats;

/// A finite, uniformly sampled signal with a positive sampling rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sampling_rate: f64,
}

impl Signal {
    /// Builds a signal, rejecting non-finite samples and non-positive rates.
    pub fn new(samples: Vec<f64>, sampling_rate: f64) -> Result<Self> {
        if !sampling_rate.is_finite() || sampling_rate <= 0.0 {
            return Err(invalid_input!(
                "sampling rate must be positive and finite, got {sampling_rate}"
            ));
        }
        if !stats::all_finite(&samples) {
            return Err(invalid_input!("signal contains non-finite samples"));
        }
        Ok(Signal { samples, sampling_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sampling_rate
    }

    pub fn mean(&self) -> f64 {
        stats::mean(&self.samples)
    }

    /// Population standard deviation of the samples.
    pub fn std(&self) -> f64 {
        stats::population_std(&self.samples)
    }

    /// Consumes the signal and returns the raw sample buffer.
    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Returns a copy with the same sampling rate and new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Signal> {
        Signal::new(samples, self.sampling_rate)
    }
}
