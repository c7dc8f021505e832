//! Synthetic signals for benchmarks: Brownian background activity,
//! periodic artifact waveforms, and text-file epoch loading.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid_input, Error, Result};
use crate::signal::Signal;
use crate::stats;

/// Waveform of a synthetic artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactShape {
    Square,
    Triangle,
}

impl ArtifactShape {
    pub fn parse(name: &str) -> Result<ArtifactShape> {
        match name {
            "square" => Ok(ArtifactShape::Square),
            "triangle" => Ok(ArtifactShape::Triangle),
            other => Err(invalid_input!(
                "unknown artifact shape '{other}' (expected square or triangle)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ArtifactShape::Square => "square",
            ArtifactShape::Triangle => "triangle",
        }
    }
}

/// Phase offset of the artifact wave, in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Fixed(f64),
    /// Drawn uniformly from `[0, period)` using the generator seed.
    Random,
}

/// Where the artifact is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Full,
    /// Samples `start..end` carry the wave; everything else is zero.
    Segment { start: usize, end: usize },
}

/// Description of one synthetic artifact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtifactSpec {
    pub shape: ArtifactShape,
    /// Target sample standard deviation over the support.
    pub amplitude: f64,
    /// Wave period in samples; need not be an integer.
    pub period: f64,
    pub phase: Phase,
    pub support: Support,
}

/// Brownian background signal: cumulative sum of standard normal steps,
/// rescaled to unit sample standard deviation. Sampling rate is 1 Hz, so
/// frequencies are in cycles per sample.
pub fn brownian(length: usize, seed: u64) -> Result<Signal> {
    if length < 2 {
        return Err(invalid_input!("brownian signal needs at least 2 samples, got {length}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(length);
    let mut acc = 0.0;
    for _ in 0..length {
        acc += rng.sample::<f64, _>(StandardNormal);
        samples.push(acc);
    }
    let std = stats::population_std(&samples);
    if std == 0.0 {
        return Err(Error::NonConvergence(
            "degenerate random walk with zero variance".into(),
        ));
    }
    for v in &mut samples {
        *v /= std;
    }
    Signal::new(samples, 1.0)
}

fn raw_wave(shape: ArtifactShape, u: f64) -> f64 {
    match shape {
        ArtifactShape::Square => {
            if u < 0.5 {
                1.0
            } else {
                -1.0
            }
        }
        ArtifactShape::Triangle => {
            if u < 0.5 {
                4.0 * u - 1.0
            } else {
                3.0 - 4.0 * u
            }
        }
    }
}

/// Periodic artifact wave of the requested shape, rescaled so its sample
/// standard deviation over the support equals `spec.amplitude`.
/// Zero outside the support. Sampling rate is 1 Hz.
pub fn artifact_wave(spec: &ArtifactSpec, length: usize, seed: u64) -> Result<Signal> {
    if length == 0 {
        return Err(invalid_input!("artifact length must be positive"));
    }
    if !spec.amplitude.is_finite() || spec.amplitude < 0.0 {
        return Err(invalid_input!("artifact amplitude must be >= 0, got {}", spec.amplitude));
    }
    if !spec.period.is_finite() || spec.period < 2.0 {
        return Err(invalid_input!(
            "artifact period must be at least 2 samples, got {}",
            spec.period
        ));
    }
    let (start, end) = match spec.support {
        Support::Full => (0, length),
        Support::Segment { start, end } => {
            if start >= end || end > length {
                return Err(invalid_input!(
                    "artifact support {start}..{end} invalid for length {length}"
                ));
            }
            (start, end)
        }
    };
    if spec.amplitude == 0.0 {
        return Signal::new(vec![0.0; length], 1.0);
    }
    let phase = match spec.phase {
        Phase::Fixed(p) => {
            if !p.is_finite() {
                return Err(invalid_input!("artifact phase must be finite"));
            }
            p.rem_euclid(spec.period)
        }
        Phase::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.gen::<f64>() * spec.period
        }
    };
    let mut samples = vec![0.0; length];
    for (n, v) in samples.iter_mut().enumerate().take(end).skip(start) {
        let u = ((n as f64 + phase) / spec.period).fract();
        *v = raw_wave(spec.shape, u);
    }
    let std = stats::population_std(&samples[start..end]);
    if std == 0.0 {
        return Err(invalid_input!(
            "artifact wave is constant over its support; cannot scale to the target amplitude"
        ));
    }
    let scale = spec.amplitude / std;
    for v in &mut samples[start..end] {
        *v *= scale;
    }
    Signal::new(samples, 1.0)
}

/// Adds an artifact to a clean signal sample by sample.
pub fn corrupt(clean: &Signal, artifact: &Signal) -> Result<Signal> {
    if clean.len() != artifact.len() {
        return Err(invalid_input!(
            "length mismatch: clean has {} samples, artifact has {}",
            clean.len(),
            artifact.len()
        ));
    }
    let samples = clean
        .samples()
        .iter()
        .zip(artifact.samples())
        .map(|(a, b)| a + b)
        .collect();
    clean.with_samples(samples)
}

/// Loads a column-per-channel text file of samples. Fields are separated by
/// commas and/or whitespace; blank lines and `#` comments are skipped; a
/// single leading non-numeric row is treated as a header. With `normalize`,
/// each column is divided by its sample standard deviation.
pub fn load_epochs(path: &Path, sampling_rate: f64, normalize: bool) -> Result<Vec<Signal>> {
    let text = std::fs::read_to_string(path)?;
    parse_epochs(&text, sampling_rate, normalize)
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_epochs(text: &str, sampling_rate: f64, normalize: bool) -> Result<Vec<Signal>> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut saw_header = false;
    let mut data_rows = 0usize;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        let parsed: std::result::Result<Vec<f64>, usize> = fields
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|_| c))
            .collect();
        let values = match parsed {
            Ok(values) => values,
            Err(column) => {
                if data_rows == 0 && !saw_header {
                    // one header row is tolerated before any data
                    saw_header = true;
                    continue;
                }
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "column {}: cannot parse '{}' as a number",
                        column + 1,
                        fields[column]
                    ),
                });
            }
        };
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("column {}: non-finite value", bad + 1),
            });
        }
        if data_rows == 0 {
            columns = vec![Vec::new(); values.len()];
        } else if values.len() != columns.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", columns.len(), values.len()),
            });
        }
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
        data_rows += 1;
    }
    if data_rows == 0 {
        return Err(Error::Parse { line: 0, message: "no data rows in file".into() });
    }
    let mut signals = Vec::with_capacity(columns.len());
    for (c, mut col) in columns.into_iter().enumerate() {
        if normalize {
            let std = stats::population_std(&col);
            if std == 0.0 {
                return Err(invalid_input!(
                    "column {} has zero variance and cannot be normalized",
                    c + 1
                ));
            }
            for v in &mut col {
                *v /= std;
            }
        }
        signals.push(Signal::new(col, sampling_rate)?);
    }
    Ok(signals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_is_deterministic_per_seed_with_unit_std() {
        let a = brownian(1024, 42).unwrap();
        let b = brownian(1024, 42).unwrap();
        let c = brownian(1024, 43).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_ne!(a.samples(), c.samples());
        assert!((a.std() - 1.0).abs() < 1e-12);
        assert_eq!(a.sampling_rate(), 1.0);
        assert!(brownian(1, 0).is_err());
    }

    #[test]
    fn brownian_looks_like_a_random_walk_not_white_noise() {
        // lag-1 autocorrelation of a rescaled random walk is close to 1
        let s = brownian(4096, 7).unwrap();
        let x = s.samples();
        let mean = stats::mean(x);
        let var = stats::population_variance(x);
        let lag1: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>()
            / ((x.len() - 1) as f64 * var);
        assert!(lag1 > 0.95, "lag-1 autocorrelation {lag1}");
    }

    #[test]
    fn square_wave_is_two_valued_and_periodic() {
        let spec = ArtifactSpec {
            shape: ArtifactShape::Square,
            amplitude: 2.0,
            period: 64.0,
            phase: Phase::Fixed(0.0),
            support: Support::Full,
        };
        let wave = artifact_wave(&spec, 1024, 0).unwrap();
        let x = wave.samples();
        assert!((stats::population_std(x) - 2.0).abs() < 1e-12);
        let positive = x.iter().cloned().fold(f64::MIN, f64::max);
        let negative = x.iter().cloned().fold(f64::MAX, f64::min);
        for &v in x {
            assert!(v == positive || v == negative, "square value {v}");
        }
        for n in 0..x.len() - 64 {
            assert_eq!(x[n], x[n + 64], "period broken at {n}");
        }
        // half the period up, half down
        assert_eq!(x.iter().filter(|&&v| v == positive).count(), 512);
    }

    #[test]
    fn triangle_wave_has_constant_slope_between_peaks() {
        let amplitude = 1.5;
        let period = 128.0;
        let spec = ArtifactSpec {
            shape: ArtifactShape::Triangle,
            amplitude,
            period,
            phase: Phase::Fixed(0.25),
            support: Support::Full,
        };
        let wave = artifact_wave(&spec, 1024, 0).unwrap();
        let x = wave.samples();
        assert!((stats::population_std(x) - amplitude).abs() < 1e-12);
        // between direction changes the discrete slope is exactly
        // 4 * scale / period where scale = amplitude / raw_std
        let raw_std = stats::population_std(
            &(0..1024)
                .map(|n| raw_wave(ArtifactShape::Triangle, ((n as f64 + 0.25) / period).fract()))
                .collect::<Vec<f64>>(),
        );
        let expected_slope = 4.0 * (amplitude / raw_std) / period;
        let mut interior_slopes = 0;
        for w in x.windows(2) {
            let d = (w[1] - w[0]).abs();
            if (d - expected_slope).abs() < 1e-9 {
                interior_slopes += 1;
            }
        }
        // all but the samples straddling a peak (2 per period)
        let periods = 1024.0 / period;
        assert!(
            interior_slopes as f64 >= 1023.0 - 2.0 * periods - 1.0,
            "only {interior_slopes} constant-slope steps"
        );
    }

    #[test]
    fn random_phase_varies_by_seed_and_fixed_phase_reproduces() {
        let mut spec = ArtifactSpec {
            shape: ArtifactShape::Square,
            amplitude: 1.0,
            period: 100.0,
            phase: Phase::Random,
            support: Support::Full,
        };
        let a = artifact_wave(&spec, 512, 1).unwrap();
        let b = artifact_wave(&spec, 512, 1).unwrap();
        let c = artifact_wave(&spec, 512, 2).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_ne!(a.samples(), c.samples());
        spec.phase = Phase::Fixed(17.5);
        let d = artifact_wave(&spec, 512, 1).unwrap();
        let e = artifact_wave(&spec, 512, 999).unwrap();
        assert_eq!(d.samples(), e.samples(), "fixed phase must ignore the seed");
    }

    #[test]
    fn segment_support_is_zero_outside_and_scaled_inside() {
        let spec = ArtifactSpec {
            shape: ArtifactShape::Triangle,
            amplitude: 3.0,
            period: 32.0,
            phase: Phase::Fixed(0.0),
            support: Support::Segment { start: 100, end: 300 },
        };
        let wave = artifact_wave(&spec, 512, 0).unwrap();
        let x = wave.samples();
        assert!(x[..100].iter().all(|&v| v == 0.0));
        assert!(x[300..].iter().all(|&v| v == 0.0));
        assert!((stats::population_std(&x[100..300]) - 3.0).abs() < 1e-12);
        // invalid bounds
        let mut bad = spec;
        bad.support = Support::Segment { start: 300, end: 100 };
        assert!(artifact_wave(&bad, 512, 0).is_err());
        bad.support = Support::Segment { start: 0, end: 513 };
        assert!(artifact_wave(&bad, 512, 0).is_err());
    }

    #[test]
    fn zero_amplitude_gives_a_zero_wave() {
        let spec = ArtifactSpec {
            shape: ArtifactShape::Square,
            amplitude: 0.0,
            period: 10.0,
            phase: Phase::Random,
            support: Support::Full,
        };
        let wave = artifact_wave(&spec, 64, 5).unwrap();
        assert!(wave.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn corrupt_adds_exactly_and_checks_lengths() {
        let clean = brownian(256, 10).unwrap();
        let spec = ArtifactSpec {
            shape: ArtifactShape::Square,
            amplitude: 2.0,
            period: 50.0,
            phase: Phase::Fixed(3.0),
            support: Support::Full,
        };
        let artifact = artifact_wave(&spec, 256, 0).unwrap();
        let dirty = corrupt(&clean, &artifact).unwrap();
        for i in 0..256 {
            assert_eq!(
                dirty.samples()[i],
                clean.samples()[i] + artifact.samples()[i]
            );
        }
        let short = artifact_wave(&spec, 255, 0);
        assert!(short.is_err() || corrupt(&clean, &short.unwrap()).is_err());
    }

    #[test]
    fn corrupted_variance_is_near_the_sum_of_component_variances() {
        // independent components: E var(x + a) = var x + var a
        let mut ratios = Vec::new();
        for seed in 0..200 {
            let clean = brownian(1024, 5000 + seed).unwrap();
            let spec = ArtifactSpec {
                shape: ArtifactShape::Square,
                amplitude: 2.0,
                period: 256.0,
                phase: Phase::Random,
                support: Support::Full,
            };
            let artifact = artifact_wave(&spec, 1024, 9000 + seed).unwrap();
            let dirty = corrupt(&clean, &artifact).unwrap();
            ratios.push(dirty.std().powi(2) / 5.0);
        }
        let mean_ratio = stats::mean(&ratios);
        assert!(
            (mean_ratio - 1.0).abs() < 0.1,
            "variance additivity ratio {mean_ratio}"
        );
    }

    #[test]
    fn load_epochs_parses_columns_headers_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("epochs.txt");
        std::fs::write(
            &path,
            "# comment\nch1 ch2\n1.0, 2.0\n3.0\t4.0\n\n5e-1 -6.25\n",
        )
        .unwrap();
        let signals = load_epochs(&path, 256.0, false).unwrap();
        assert_eq!(signals.len(), 2);
        assert_eq!(signals[0].samples(), &[1.0, 3.0, 0.5]);
        assert_eq!(signals[1].samples(), &[2.0, 4.0, -6.25]);
        assert_eq!(signals[0].sampling_rate(), 256.0);
    }

    #[test]
    fn load_epochs_errors_name_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = dir.path().join("ragged.txt");
        std::fs::write(&ragged, "1 2\n3 4 5\n").unwrap();
        let err = load_epochs(&ragged, 1.0, false).unwrap_err().to_string();
        assert!(err.contains("line 2"), "got: {err}");
        assert!(err.contains("expected 2 columns, found 3"), "got: {err}");

        let junk = dir.path().join("junk.txt");
        std::fs::write(&junk, "1 2\n3 oops\n").unwrap();
        let err = load_epochs(&junk, 1.0, false).unwrap_err().to_string();
        assert!(err.contains("line 2"), "got: {err}");
        assert!(err.contains("column 2"), "got: {err}");

        let empty = dir.path().join("empty.txt");
        std::fs::write(&empty, "# nothing\n\n").unwrap();
        let err = load_epochs(&empty, 1.0, false).unwrap_err().to_string();
        assert!(err.contains("no data rows"), "got: {err}");
    }

    #[test]
    fn load_epochs_normalizes_to_unit_std_and_rejects_constants() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scaled.txt");
        let rows: String = (0..100).map(|i| format!("{} {}\n", i as f64 * 0.5, 7.0)).collect();
        std::fs::write(&path, &rows).unwrap();
        let signals = load_epochs(&path, 1.0, false).unwrap();
        assert!(signals[1].samples().iter().all(|&v| v == 7.0));
        let normalized = load_epochs(&path, 1.0, true);
        // second column is constant: zero variance
        assert!(normalized.is_err());

        let ok = dir.path().join("ok.txt");
        let rows: String = (0..100).map(|i| format!("{}\n", (i as f64 * 0.37).sin() * 9.0)).collect();
        std::fs::write(&ok, &rows).unwrap();
        let signals = load_epochs(&ok, 1.0, true).unwrap();
        assert!((signals[0].std() - 1.0).abs() < 1e-12);
    }
}
