//! Command-line front end: denoising, benchmarking, distribution fitting,
//! and spectral output for plain-text signal files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wqn_core::bench::{
    amplitude_sweep, format_summary_table, parse_config_file, run_experiment, Method,
};
use wqn_core::metrics::{self, PsdConfig};
use wqn_core::simulate::load_epochs;
use wqn_core::thresholding::{
    apply_thresholds, lowpass_baseline, scale_mad_sigma, sure_thresholds, universal_thresholds,
    ThresholdSpec,
};
use wqn_core::wavelet::{decompose, default_levels, reconstruct, Boundary, WaveletSpec};
use wqn_core::wqn::{correct_stream, process_stream, Interval, StreamConfig};
use wqn_core::Signal;

#[derive(Parser)]
#[command(name = "wqn", version, about = "Wavelet-domain artifact removal and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove artifacts from a single-column signal file.
    Denoise(DenoiseArgs),
    /// Run the synthetic benchmark described by a config file.
    Bench(BenchArgs),
    /// Run the benchmark across the config's amplitude grid.
    Sweep(BenchArgs),
    /// Fit a generalized Gaussian to the coefficients of every scale.
    FitGgd(FitGgdArgs),
    /// Emit a short-time spectrogram as CSV.
    Spectrogram(SpectrogramArgs),
    /// Emit a Welch power spectral density estimate as CSV.
    Psd(PsdArgs),
}

#[derive(Args)]
struct DenoiseArgs {
    /// Input signal file: one sample per row, single column.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the corrected signal (one sample per line).
    #[arg(long)]
    output: PathBuf,
    /// wqn, universal, sureshrink, or lowpass.
    #[arg(long, default_value = "wqn")]
    method: String,
    #[arg(long, default_value = "sym5")]
    wavelet: String,
    /// Decomposition depth, or `auto`.
    #[arg(long, default_value = "auto")]
    levels: String,
    #[arg(long, default_value_t = 2.0)]
    epoch_seconds: f64,
    #[arg(long, default_value_t = 256.0)]
    sampling_rate: f64,
    /// Artifact intervals file: one `start_seconds end_seconds` pair per
    /// line, start inclusive, end exclusive.
    #[arg(long)]
    intervals: Option<PathBuf>,
    /// Divide the input by its sample standard deviation first.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Flat key=value experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FitGgdArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "sym5")]
    wavelet: String,
    #[arg(long, default_value = "auto")]
    levels: String,
    #[arg(long, default_value_t = 256.0)]
    sampling_rate: f64,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct SpectrogramArgs {
    #[arg(long)]
    input: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    window_seconds: f64,
    /// Fractional window overlap in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    #[arg(long, default_value_t = 256.0)]
    sampling_rate: f64,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct PsdArgs {
    #[arg(long)]
    input: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Welch segment length in samples (even, at least 8); automatic when
    /// omitted.
    #[arg(long)]
    segment: Option<usize>,
    /// Fractional segment overlap in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    #[arg(long, default_value_t = 256.0)]
    sampling_rate: f64,
    #[arg(long)]
    normalize: bool,
}

/// Exit 2: the invocation or an input file is malformed. Exit 1: the
/// computation itself failed.
enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn config(context: &str, err: impl std::fmt::Display) -> Failure {
        Failure::Config(format!("{context}: {err}"))
    }

    fn runtime(err: impl std::fmt::Display) -> Failure {
        Failure::Runtime(err.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Denoise(args) => denoise(args),
        Command::Bench(args) => bench(args, false),
        Command::Sweep(args) => bench(args, true),
        Command::FitGgd(args) => fit_ggd(args),
        Command::Spectrogram(args) => spectrogram_cmd(args),
        Command::Psd(args) => psd_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn parse_levels(option: &str) -> CliResult<Option<usize>> {
    if option.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    match option.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(Failure::Config(format!(
            "--levels expects 'auto' or a positive integer, got '{option}'"
        ))),
    }
}

fn parse_wavelet(name: &str) -> CliResult<WaveletSpec> {
    WaveletSpec::from_name(name).map_err(|e| Failure::config("--wavelet", e))
}

fn load_single_column(path: &Path, sampling_rate: f64, normalize: bool) -> CliResult<Signal> {
    if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
        return Err(Failure::Config(format!(
            "--sampling-rate must be positive, got {sampling_rate}"
        )));
    }
    let mut signals = load_epochs(path, sampling_rate, normalize)
        .map_err(|e| Failure::config(&path.display().to_string(), e))?;
    if signals.len() != 1 {
        return Err(Failure::Config(format!(
            "{}: expected a single-column signal, found {} columns",
            path.display(),
            signals.len()
        )));
    }
    Ok(signals.remove(0))
}

fn load_columns(path: &Path, sampling_rate: f64, normalize: bool) -> CliResult<Vec<Signal>> {
    if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
        return Err(Failure::Config(format!(
            "--sampling-rate must be positive, got {sampling_rate}"
        )));
    }
    load_epochs(path, sampling_rate, normalize)
        .map_err(|e| Failure::config(&path.display().to_string(), e))
}

fn load_intervals(path: &Path, duration: f64) -> CliResult<Vec<Interval>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(&path.display().to_string(), e))?;
    let mut intervals = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: String| {
            Failure::Config(format!("{} line {}: {message}", path.display(), idx + 1))
        };
        if fields.len() != 2 {
            return Err(bad(format!(
                "expected 'start_seconds end_seconds', got {} fields",
                fields.len()
            )));
        }
        let start: f64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("cannot parse '{}' as seconds", fields[0])))?;
        let end: f64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("cannot parse '{}' as seconds", fields[1])))?;
        intervals.push(Interval::new(start, end).map_err(|e| bad(e.to_string()))?);
    }
    // overlap and bounds problems come from this file, so they are config
    // errors here even though the stream engine rechecks them
    let mut sorted = intervals.clone();
    sorted.sort_by(|a, b| a.start_seconds.total_cmp(&b.start_seconds));
    for pair in sorted.windows(2) {
        if pair[1].start_seconds < pair[0].end_seconds {
            return Err(Failure::Config(format!(
                "{}: intervals [{}, {}) and [{}, {}) overlap",
                path.display(),
                pair[0].start_seconds,
                pair[0].end_seconds,
                pair[1].start_seconds,
                pair[1].end_seconds
            )));
        }
    }
    if let Some(last) = sorted.last() {
        if last.end_seconds > duration * (1.0 + 1e-12) {
            return Err(Failure::Config(format!(
                "{}: interval [{}, {}) extends past the signal end ({duration} s)",
                path.display(),
                last.start_seconds,
                last.end_seconds
            )));
        }
    }
    Ok(intervals)
}

fn write_samples(path: &Path, samples: &[f64]) -> CliResult<()> {
    let mut text = String::with_capacity(samples.len() * 18);
    for v in samples {
        writeln!(text, "{v:.8e}").expect("writing to a string cannot fail");
    }
    std::fs::write(path, text).map_err(Failure::runtime)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(Failure::runtime)
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".report.json");
    PathBuf::from(name)
}

fn denoise(args: DenoiseArgs) -> CliResult<()> {
    let wavelet = parse_wavelet(&args.wavelet)?;
    let levels = parse_levels(&args.levels)?;
    let method = args.method.to_ascii_lowercase();
    let known = ["wqn", "universal", "sureshrink", "lowpass"];
    if matches!(method.as_str(), "hard-ideal" | "soft-ideal") {
        return Err(Failure::Config(format!(
            "--method {method} needs the clean signal (benchmark only); choose one of {}",
            known.join(", ")
        )));
    }
    if !known.contains(&method.as_str()) {
        return Err(Failure::Config(format!(
            "--method '{}' is unknown; choose one of {}",
            args.method,
            known.join(", ")
        )));
    }
    let signal = load_single_column(&args.input, args.sampling_rate, args.normalize)?;

    let intervals = match &args.intervals {
        Some(path) => Some(load_intervals(path, signal.duration())?),
        None => None,
    };
    if method == "wqn" && intervals.is_none() {
        return Err(Failure::Config(
            "--method wqn requires --intervals (artifact spans are not auto-detected)".into(),
        ));
    }

    let stream_config = StreamConfig {
        epoch_seconds: args.epoch_seconds,
        levels,
        ..StreamConfig::default()
    };
    if !(stream_config.epoch_seconds.is_finite() && stream_config.epoch_seconds > 0.0) {
        return Err(Failure::Config(format!(
            "--epoch-seconds must be positive, got {}",
            args.epoch_seconds
        )));
    }

    let (corrected, report_json) = match intervals {
        Some(intervals) => {
            let (corrected, report) = match method.as_str() {
                "wqn" => correct_stream(&signal, &intervals, &wavelet, &stream_config),
                _ => process_stream(
                    &signal,
                    &intervals,
                    &wavelet,
                    &stream_config,
                    |artifact, reference, depth| {
                        let dec = decompose(artifact, &wavelet, depth, stream_config.boundary)?;
                        let cleaned = match method.as_str() {
                            "lowpass" => lowpass_baseline(&dec),
                            _ => {
                                let dec_ref =
                                    decompose(reference, &wavelet, depth, stream_config.boundary)?;
                                let sigma = scale_mad_sigma(&dec_ref);
                                let spec = threshold_spec(&method, &dec, &sigma, artifact.len())?;
                                apply_thresholds(&dec, &spec)?
                            }
                        };
                        Ok((reconstruct(&cleaned)?, None))
                    },
                ),
            }
            .map_err(Failure::runtime)?;
            let json = serde_json::json!({
                "method": method,
                "wavelet": wavelet.name(),
                "epoch_seconds": stream_config.epoch_seconds,
                "stream": report.summary_json(),
            });
            (corrected.into_samples(), json)
        }
        None => {
            let depth =
                levels.unwrap_or_else(|| default_levels(signal.len(), &wavelet, Boundary::Symmetric));
            let dec = decompose(signal.samples(), &wavelet, depth, Boundary::Symmetric)
                .map_err(Failure::runtime)?;
            let (cleaned, thresholds) = match method.as_str() {
                "lowpass" => (lowpass_baseline(&dec), None),
                _ => {
                    let sigma = scale_mad_sigma(&dec);
                    let spec = threshold_spec(&method, &dec, &sigma, signal.len())
                        .map_err(Failure::runtime)?;
                    (apply_thresholds(&dec, &spec).map_err(Failure::runtime)?, Some(spec))
                }
            };
            let out = reconstruct(&cleaned).map_err(Failure::runtime)?;
            let json = serde_json::json!({
                "method": method,
                "wavelet": wavelet.name(),
                "levels": depth,
                "thresholds": thresholds.map(|s| s.per_scale),
            });
            (out, json)
        }
    };

    write_samples(&args.output, &corrected)?;
    let pretty = serde_json::to_string_pretty(&report_json).expect("report serializes");
    write_text(&sidecar_path(&args.output), &pretty)
}

fn threshold_spec(
    method: &str,
    decomposition: &wqn_core::WaveletDecomposition,
    sigma: &[f64],
    signal_len: usize,
) -> wqn_core::Result<ThresholdSpec> {
    match method {
        "universal" => universal_thresholds(sigma, signal_len),
        "sureshrink" => sure_thresholds(decomposition, sigma),
        other => unreachable!("method '{other}' is validated before dispatch"),
    }
}

fn bench(args: BenchArgs, sweep: bool) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::config(&args.config.display().to_string(), e))?;
    let mut config = parse_config_file(&text)
        .map_err(|e| Failure::config(&args.config.display().to_string(), e))?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if sweep && config.amplitudes.len() < 2 {
        return Err(Failure::Config(format!(
            "{}: a sweep needs at least 2 amplitudes, got {}",
            args.config.display(),
            config.amplitudes.len()
        )));
    }
    if sweep && !config.methods.contains(&Method::Universal) {
        // the sweep contrasts methods against the universal baseline's
        // growth, so nudge rather than silently aggregate less
        eprintln!("note: sweep config does not include the universal method");
    }
    let result = if sweep { amplitude_sweep(&config) } else { run_experiment(&config) }
        .map_err(Failure::runtime)?;
    print!("{}", format_summary_table(&result));
    if let Some(path) = &config.csv_path {
        println!("records: {}", path.display());
    }
    if let Some(path) = &config.json_path {
        println!("summary: {}", path.display());
    }
    Ok(())
}

fn fit_ggd(args: FitGgdArgs) -> CliResult<()> {
    let wavelet = parse_wavelet(&args.wavelet)?;
    let levels = parse_levels(&args.levels)?;
    let epochs = load_columns(&args.input, args.sampling_rate, args.normalize)?;
    let shortest = epochs.iter().map(Signal::len).min().expect("at least one column");
    let depth = levels.unwrap_or_else(|| default_levels(shortest, &wavelet, Boundary::Symmetric));

    // pool coefficients per scale across all epochs, then fit each pool
    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); depth + 1];
    for epoch in &epochs {
        let dec = decompose(epoch.samples(), &wavelet, depth, Boundary::Symmetric)
            .map_err(Failure::runtime)?;
        for (m, pool) in pooled.iter_mut().enumerate() {
            pool.extend_from_slice(dec.scale(m + 1).expect("scale within depth"));
        }
    }
    let mut scales = Vec::with_capacity(pooled.len());
    for (idx, pool) in pooled.iter().enumerate() {
        let scale = idx + 1;
        let fit = metrics::fit_generalized_gaussian(pool)
            .map_err(|e| Failure::Runtime(format!("scale {scale}: {e}")))?;
        scales.push(serde_json::json!({
            "scale": scale,
            "kind": if scale == depth + 1 { "approximation" } else { "detail" },
            "alpha": fit.alpha,
            "beta": fit.beta,
            "loglik": fit.loglik,
            "coefficients": pool.len(),
        }));
    }
    let report = serde_json::json!({
        "wavelet": wavelet.name(),
        "levels": depth,
        "epochs": epochs.len(),
        "scales": scales,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

fn spectrogram_cmd(args: SpectrogramArgs) -> CliResult<()> {
    let signal = load_single_column(&args.input, args.sampling_rate, args.normalize)?;
    if !(0.0..1.0).contains(&args.overlap) {
        return Err(Failure::Config(format!(
            "--overlap must lie in [0, 1), got {}",
            args.overlap
        )));
    }
    if !(args.window_seconds.is_finite() && args.window_seconds > 0.0) {
        return Err(Failure::Config(format!(
            "--window-seconds must be positive, got {}",
            args.window_seconds
        )));
    }
    let estimate = metrics::spectrogram(&signal, args.window_seconds, args.overlap)
        .map_err(Failure::runtime)?;
    match &args.output {
        Some(path) => write_text(path, &estimate.to_csv()),
        None => {
            print!("{}", estimate.to_csv());
            Ok(())
        }
    }
}

fn psd_cmd(args: PsdArgs) -> CliResult<()> {
    let signal = load_single_column(&args.input, args.sampling_rate, args.normalize)?;
    if !(0.0..1.0).contains(&args.overlap) {
        return Err(Failure::Config(format!(
            "--overlap must lie in [0, 1), got {}",
            args.overlap
        )));
    }
    let config = PsdConfig { segment_length: args.segment, overlap_fraction: args.overlap };
    let estimate = metrics::psd(&signal, &config).map_err(Failure::runtime)?;
    match &args.output {
        Some(path) => write_text(path, &estimate.to_csv()),
        None => {
            print!("{}", estimate.to_csv());
            Ok(())
        }
    }
}
