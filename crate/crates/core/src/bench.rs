//! Experiment harness: realization sweeps over artifact shapes and
//! amplitudes, running every correction method and aggregating restoration
//! metrics.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{invalid_input, Result};
use crate::metrics::{
    avg_amplitude_wasserstein, avg_coefficient_wasserstein, default_fit_band, hurst_from_psd,
    mse, psd, PsdConfig,
};
use crate::signal::Signal;
use crate::simulate::{artifact_wave, brownian, corrupt, ArtifactShape, ArtifactSpec, Phase, Support};
use crate::stats;
use crate::thresholding::{
    apply_thresholds, ideal_thresholds, lowpass_baseline, scale_std, sure_thresholds,
    universal_thresholds, OracleContext, ThresholdMethod, ThresholdSpec,
};
use crate::wavelet::{decompose, default_levels, reconstruct, Boundary, WaveletSpec};
use crate::wqn::correct_epoch;

/// Correction methods compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    HardIdeal,
    SoftIdeal,
    SureShrink,
    Universal,
    Lowpass,
    Wqn,
}

impl Method {
    pub fn parse(name: &str) -> Result<Method> {
        match name {
            "hard-ideal" => Ok(Method::HardIdeal),
            "soft-ideal" => Ok(Method::SoftIdeal),
            "sureshrink" => Ok(Method::SureShrink),
            "universal" => Ok(Method::Universal),
            "lowpass" => Ok(Method::Lowpass),
            "wqn" => Ok(Method::Wqn),
            other => Err(invalid_input!(
                "unknown method '{other}' (expected hard-ideal, soft-ideal, sureshrink, universal, lowpass, or wqn)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::HardIdeal => "hard-ideal",
            Method::SoftIdeal => "soft-ideal",
            Method::SureShrink => "sureshrink",
            Method::Universal => "universal",
            Method::Lowpass => "lowpass",
            Method::Wqn => "wqn",
        }
    }

    /// Needs the clean signal (or its per-scale noise level) to run.
    pub fn needs_oracle(&self) -> bool {
        matches!(self, Method::HardIdeal | Method::SoftIdeal | Method::Universal)
    }

    pub fn all() -> Vec<Method> {
        vec![
            Method::HardIdeal,
            Method::SoftIdeal,
            Method::SureShrink,
            Method::Universal,
            Method::Lowpass,
            Method::Wqn,
        ]
    }
}

/// Full description of one benchmark run. Amplitudes are multiples of the
/// clean signal's standard deviation.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_realizations: usize,
    pub epoch_length: usize,
    pub shapes: Vec<ArtifactShape>,
    pub amplitudes: Vec<f64>,
    pub artifact_period: f64,
    pub wavelet: String,
    /// None picks the default depth for the epoch length.
    pub levels: Option<usize>,
    pub boundary: Boundary,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    /// When false, thresholding methods leave the approximation untouched.
    pub threshold_approximation: bool,
    /// When true, the universal threshold uses the epoch length as n on
    /// every scale; otherwise each scale uses its own coefficient count.
    pub universal_full_length: bool,
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_realizations: 200,
            epoch_length: 1024,
            shapes: vec![ArtifactShape::Square, ArtifactShape::Triangle],
            amplitudes: vec![2.0],
            artifact_period: 256.0,
            wavelet: "sym5".into(),
            levels: None,
            boundary: Boundary::Symmetric,
            methods: Method::all(),
            base_seed: 7,
            threshold_approximation: true,
            universal_full_length: true,
            csv_path: None,
            json_path: None,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(WaveletSpec, usize)> {
        if self.n_realizations == 0 {
            return Err(invalid_input!("n_realizations must be at least 1"));
        }
        if self.shapes.is_empty() {
            return Err(invalid_input!("at least one artifact shape is required"));
        }
        if self.amplitudes.is_empty() {
            return Err(invalid_input!("amplitude grid must be nonempty"));
        }
        if self.amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(invalid_input!("amplitudes must be finite and nonnegative"));
        }
        if self.methods.is_empty() {
            return Err(invalid_input!("method list must be nonempty"));
        }
        if !self.artifact_period.is_finite() || self.artifact_period < 2.0 {
            return Err(invalid_input!(
                "artifact period must be at least 2 samples, got {}",
                self.artifact_period
            ));
        }
        let wavelet = WaveletSpec::from_name(&self.wavelet)?;
        let levels = match self.levels {
            Some(l) => l,
            None => default_levels(self.epoch_length, &wavelet, self.boundary),
        };
        // probe feasibility once so workers cannot hit a config error
        decompose(&vec![0.0; self.epoch_length], &wavelet, levels, self.boundary)?;
        Ok((wavelet, levels))
    }
}

/// Metrics of one method on one realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub method: &'static str,
    pub shape: &'static str,
    pub amplitude: f64,
    pub realization: usize,
    pub mse: f64,
    pub wasserstein_signed: f64,
    pub wasserstein_abs: f64,
    pub alpha: Option<f64>,
    pub hurst: Option<f64>,
}

/// Mean, median, and interquartile range of one metric over realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

impl MetricSummary {
    fn from_values(values: &[f64]) -> MetricSummary {
        MetricSummary {
            mean: stats::mean(values),
            median: stats::median(values),
            q25: stats::quantile(values, 0.25),
            q75: stats::quantile(values, 0.75),
        }
    }
}

/// Aggregated metrics for one (method, shape, amplitude) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub method: &'static str,
    pub shape: &'static str,
    pub amplitude: f64,
    pub realizations: usize,
    pub mse: MetricSummary,
    pub wasserstein_signed: MetricSummary,
    pub wasserstein_abs: MetricSummary,
    /// Present when at least one realization produced a spectral fit;
    /// summarizes only those realizations.
    pub alpha: Option<MetricSummary>,
    pub hurst: Option<MetricSummary>,
    pub spectral_fits: usize,
}

/// Raw records plus aggregates for every cell of the sweep.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
    pub levels: usize,
    pub hurst_fit_band: (f64, f64),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for one named stream of one realization. Streams depend only on
/// the base seed and the realization index, so the same clean signal,
/// artifact phase, and reference epoch are reused across shapes and
/// amplitudes, and scheduling cannot change any result.
fn stream_seed(base_seed: u64, realization: usize, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ realization as u64) ^ stream)
}

const STREAM_CLEAN: u64 = 0;
const STREAM_ARTIFACT: u64 = 1;
const STREAM_REFERENCE: u64 = 2;

struct TaskContext<'a> {
    config: &'a ExperimentConfig,
    wavelet: &'a WaveletSpec,
    levels: usize,
    band: (f64, f64),
}

fn finish_thresholds(spec: ThresholdSpec, keep_approximation: bool) -> ThresholdSpec {
    if keep_approximation {
        spec
    } else {
        spec.without_approximation()
    }
}

fn run_task(
    ctx: &TaskContext<'_>,
    shape: ArtifactShape,
    amplitude: f64,
    realization: usize,
) -> Result<Vec<Record>> {
    let cfg = ctx.config;
    let n = cfg.epoch_length;
    let x = brownian(n, stream_seed(cfg.base_seed, realization, STREAM_CLEAN))?;
    let artifact_spec = ArtifactSpec {
        shape,
        amplitude,
        period: cfg.artifact_period,
        phase: Phase::Random,
        support: Support::Full,
    };
    let artifact = artifact_wave(
        &artifact_spec,
        n,
        stream_seed(cfg.base_seed, realization, STREAM_ARTIFACT),
    )?;
    let y = corrupt(&x, &artifact)?;
    let dec_x = decompose(x.samples(), ctx.wavelet, ctx.levels, cfg.boundary)?;
    let dec_y = decompose(y.samples(), ctx.wavelet, ctx.levels, cfg.boundary)?;
    let sigma_x = scale_std(&dec_x);
    let mut records = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let restored_samples = match method {
            Method::HardIdeal | Method::SoftIdeal => {
                let kind = if method == Method::HardIdeal {
                    ThresholdMethod::Hard
                } else {
                    ThresholdMethod::Soft
                };
                let oracle = OracleContext { clean: &dec_x };
                let spec = finish_thresholds(
                    ideal_thresholds(&dec_y, &oracle, kind)?,
                    cfg.threshold_approximation,
                );
                reconstruct(&apply_thresholds(&dec_y, &spec)?)?
            }
            Method::SureShrink => {
                let spec = finish_thresholds(
                    sure_thresholds(&dec_y, &sigma_x)?,
                    cfg.threshold_approximation,
                );
                reconstruct(&apply_thresholds(&dec_y, &spec)?)?
            }
            Method::Universal => {
                let spec = if cfg.universal_full_length {
                    universal_thresholds(&sigma_x, n)?
                } else {
                    let mut per_scale = Vec::with_capacity(sigma_x.len());
                    for m in 1..=dec_y.scale_count() {
                        let len = dec_y.scale(m)?.len();
                        per_scale
                            .push(universal_thresholds(&sigma_x[m - 1..m], len)?.per_scale[0]);
                    }
                    ThresholdSpec { method: ThresholdMethod::Soft, per_scale }
                };
                let spec = finish_thresholds(spec, cfg.threshold_approximation);
                reconstruct(&apply_thresholds(&dec_y, &spec)?)?
            }
            Method::Lowpass => reconstruct(&lowpass_baseline(&dec_y))?,
            Method::Wqn => {
                let reference = brownian(
                    n,
                    stream_seed(cfg.base_seed, realization, STREAM_REFERENCE),
                )?;
                let (samples, _) = correct_epoch(
                    y.samples(),
                    reference.samples(),
                    ctx.wavelet,
                    ctx.levels,
                    cfg.boundary,
                )?;
                samples
            }
        };
        let restored = Signal::new(restored_samples, 1.0)?;
        let dec_restored =
            decompose(restored.samples(), ctx.wavelet, ctx.levels, cfg.boundary)?;
        let fit = psd(&restored, &PsdConfig::default())
            .and_then(|est| hurst_from_psd(&est, ctx.band))
            .ok();
        records.push(Record {
            method: method.name(),
            shape: shape.name(),
            amplitude,
            realization,
            mse: mse(&restored, &x)?,
            wasserstein_signed: avg_coefficient_wasserstein(&dec_restored, &dec_x)?,
            wasserstein_abs: avg_amplitude_wasserstein(&dec_restored, &dec_x)?,
            alpha: fit.map(|f| f.alpha),
            hurst: fit.map(|f| f.hurst),
        });
    }
    Ok(records)
}

fn aggregate(config: &ExperimentConfig, records: &[Record]) -> Vec<Aggregate> {
    let mut aggregates = Vec::new();
    for &method in &config.methods {
        for &shape in &config.shapes {
            for &amplitude in &config.amplitudes {
                let cell: Vec<&Record> = records
                    .iter()
                    .filter(|r| {
                        r.method == method.name()
                            && r.shape == shape.name()
                            && r.amplitude == amplitude
                    })
                    .collect();
                let collect = |f: fn(&Record) -> f64| -> Vec<f64> {
                    cell.iter().map(|r| f(r)).collect()
                };
                let alphas: Vec<f64> = cell.iter().filter_map(|r| r.alpha).collect();
                let hursts: Vec<f64> = cell.iter().filter_map(|r| r.hurst).collect();
                aggregates.push(Aggregate {
                    method: method.name(),
                    shape: shape.name(),
                    amplitude,
                    realizations: cell.len(),
                    mse: MetricSummary::from_values(&collect(|r| r.mse)),
                    wasserstein_signed: MetricSummary::from_values(
                        &collect(|r| r.wasserstein_signed),
                    ),
                    wasserstein_abs: MetricSummary::from_values(
                        &collect(|r| r.wasserstein_abs),
                    ),
                    alpha: if alphas.is_empty() {
                        None
                    } else {
                        Some(MetricSummary::from_values(&alphas))
                    },
                    hurst: if hursts.is_empty() {
                        None
                    } else {
                        Some(MetricSummary::from_values(&hursts))
                    },
                    spectral_fits: hursts.len(),
                });
            }
        }
    }
    aggregates
}

/// Runs the full sweep. Realizations are independent and run in parallel;
/// record order and content depend only on the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let (wavelet, levels) = config.validate()?;
    let band = default_fit_band(config.epoch_length, 1.0);
    let ctx = TaskContext { config, wavelet: &wavelet, levels, band };
    let mut tasks = Vec::new();
    for &shape in &config.shapes {
        for &amplitude in &config.amplitudes {
            for realization in 0..config.n_realizations {
                tasks.push((shape, amplitude, realization));
            }
        }
    }
    let per_task: Vec<Result<Vec<Record>>> = tasks
        .par_iter()
        .map(|&(shape, amplitude, realization)| run_task(&ctx, shape, amplitude, realization))
        .collect();
    let mut records = Vec::with_capacity(tasks.len() * config.methods.len());
    for task in per_task {
        records.extend(task?);
    }
    let aggregates = aggregate(config, &records);
    let result = ExperimentResult { records, aggregates, levels, hurst_fit_band: band };
    if let Some(path) = &config.csv_path {
        write_records_csv(&result.records, path)?;
    }
    if let Some(path) = &config.json_path {
        std::fs::write(path, serde_json::to_string_pretty(&summary_json(config, &result))?)?;
    }
    Ok(result)
}

/// Runs a multi-amplitude sweep; the amplitude grid must have at least two
/// points and its order is preserved in records and aggregates.
pub fn amplitude_sweep(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.amplitudes.len() < 2 {
        return Err(invalid_input!(
            "amplitude sweep needs at least 2 amplitudes, got {}",
            config.amplitudes.len()
        ));
    }
    run_experiment(config)
}

fn format_float(v: f64) -> String {
    format!("{v:.8e}")
}

fn format_optional(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// One CSV row per record, header included.
pub fn records_csv(records: &[Record]) -> String {
    let mut out = String::from(
        "method,shape,amplitude,realization,mse,wasserstein_signed,wasserstein_abs,alpha,hurst\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.shape,
            format_float(r.amplitude),
            r.realization,
            format_float(r.mse),
            format_float(r.wasserstein_signed),
            format_float(r.wasserstein_abs),
            format_optional(r.alpha),
            format_optional(r.hurst),
        ));
    }
    out
}

pub fn write_records_csv(records: &[Record], path: &Path) -> Result<()> {
    std::fs::write(path, records_csv(records))?;
    Ok(())
}

/// JSON document with the config echo and all aggregates.
pub fn summary_json(config: &ExperimentConfig, result: &ExperimentResult) -> serde_json::Value {
    json!({
        "config": {
            "n_realizations": config.n_realizations,
            "epoch_length": config.epoch_length,
            "shapes": config.shapes.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "amplitudes": config.amplitudes,
            "amplitude_unit": "multiple of the clean signal standard deviation",
            "artifact_period": config.artifact_period,
            "wavelet": config.wavelet,
            "levels": result.levels,
            "boundary": config.boundary.name(),
            "methods": config.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "base_seed": config.base_seed,
            "threshold_approximation": config.threshold_approximation,
            "universal_full_length": config.universal_full_length,
            "hurst_fit_band": [result.hurst_fit_band.0, result.hurst_fit_band.1],
        },
        "aggregates": result.aggregates,
    })
}

/// Fixed-width table of mean metrics, one block per (shape, amplitude).
pub fn format_summary_table(result: &ExperimentResult) -> String {
    let mut out = String::new();
    let mut seen: Vec<(&str, f64)> = Vec::new();
    for a in &result.aggregates {
        if !seen.iter().any(|&(s, amp)| s == a.shape && amp == a.amplitude) {
            seen.push((a.shape, a.amplitude));
        }
    }
    for (shape, amplitude) in seen {
        out.push_str(&format!("shape={shape} amplitude={amplitude}\n"));
        out.push_str(&format!(
            "{:<12} {:>10} {:>12} {:>12} {:>8} {:>8}\n",
            "method", "mse", "w1(signed)", "w1(abs)", "alpha", "hurst"
        ));
        for a in &result.aggregates {
            if a.shape != shape || a.amplitude != amplitude {
                continue;
            }
            let fmt_opt = |m: &Option<MetricSummary>| -> String {
                m.map(|s| format!("{:.2}", s.mean)).unwrap_or_else(|| "-".into())
            };
            out.push_str(&format!(
                "{:<12} {:>10.4} {:>12.4} {:>12.4} {:>8} {:>8}\n",
                a.method,
                a.mse.mean,
                a.wasserstein_signed.mean,
                a.wasserstein_abs.mean,
                fmt_opt(&a.alpha),
                fmt_opt(&a.hurst),
            ));
        }
        out.push('\n');
    }
    out
}

/// Parses a flat key=value config file; `#` starts a comment, blank lines
/// are skipped, unknown keys are rejected.
pub fn parse_config_file(text: &str) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| crate::error::Error::Parse {
            line: line_no,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_err = |what: &str| crate::error::Error::Parse {
            line: line_no,
            message: format!("invalid {what} '{value}' for key '{key}'"),
        };
        match key {
            "n_realizations" => {
                config.n_realizations = value.parse().map_err(|_| parse_err("count"))?;
            }
            "epoch_length" => {
                config.epoch_length = value.parse().map_err(|_| parse_err("length"))?;
            }
            "shapes" => {
                let shapes: Result<Vec<ArtifactShape>> =
                    value.split(',').map(|s| ArtifactShape::parse(s.trim())).collect();
                config.shapes = shapes.map_err(|e| crate::error::Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            }
            "amplitudes" => {
                let amps: std::result::Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse::<f64>()).collect();
                config.amplitudes = amps.map_err(|_| parse_err("amplitude list"))?;
            }
            "artifact_period" => {
                config.artifact_period = value.parse().map_err(|_| parse_err("period"))?;
            }
            "wavelet" => config.wavelet = value.to_string(),
            "levels" => {
                config.levels = if value == "auto" {
                    None
                } else {
                    Some(value.parse().map_err(|_| parse_err("level count"))?)
                };
            }
            "boundary" => {
                config.boundary = Boundary::parse(value).map_err(|e| {
                    crate::error::Error::Parse { line: line_no, message: e.to_string() }
                })?;
            }
            "methods" => {
                let methods: Result<Vec<Method>> =
                    value.split(',').map(|s| Method::parse(s.trim())).collect();
                config.methods = methods.map_err(|e| crate::error::Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            }
            "base_seed" => {
                config.base_seed = value.parse().map_err(|_| parse_err("seed"))?;
            }
            "threshold_approximation" => {
                config.threshold_approximation =
                    value.parse().map_err(|_| parse_err("boolean"))?;
            }
            "universal_full_length" => {
                config.universal_full_length =
                    value.parse().map_err(|_| parse_err("boolean"))?;
            }
            "csv" => config.csv_path = Some(PathBuf::from(value)),
            "json" => config.json_path = Some(PathBuf::from(value)),
            other => {
                return Err(crate::error::Error::Parse {
                    line: line_no,
                    message: format!("unknown config key '{other}'"),
                });
            }
        }
    }
    Ok(config)
}
