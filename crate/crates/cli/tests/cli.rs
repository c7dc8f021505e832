//! End-to-end checks of the installed binary: exit codes, file outputs,
//! and the documented error contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wqn"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stderr_line(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).trim().to_string()
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn write_walk(dir: &Path, name: &str, n: usize, seed: u64) -> PathBuf {
    // deterministic pseudo random walk, no dependency on the core crate
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut text = String::new();
    let mut x = 0.0;
    for _ in 0..n {
        x += next();
        text.push_str(&format!("{x:.9}\n"));
    }
    write_file(dir, name, &text)
}

fn read_column(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

#[test]
fn wqn_without_intervals_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 1024, 7);
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.path().join("out.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr_line(&out);
    assert!(message.starts_with("error:"), "got: {message}");
    assert!(message.contains("--intervals"), "got: {message}");
}

#[test]
fn oracle_methods_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 1024, 7);
    for method in ["hard-ideal", "soft-ideal"] {
        let out = run(&[
            "denoise",
            "--input",
            input.to_str().unwrap(),
            "--output",
            dir.path().join("out.txt").to_str().unwrap(),
            "--method",
            method,
        ]);
        assert_eq!(out.status.code(), Some(2), "method {method}");
        assert!(stderr_line(&out).starts_with("error:"));
    }
}

#[test]
fn unknown_wavelet_and_bad_levels_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 512, 9);
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--method",
        "lowpass",
        "--wavelet",
        "sym99",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("--wavelet"));

    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--method",
        "lowpass",
        "--levels",
        "zero",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("--levels"));
}

#[test]
fn missing_input_file_is_a_usage_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "psd",
        "--input",
        dir.path().join("absent.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("absent.txt"));
}

#[test]
fn empty_intervals_file_reproduces_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 2048, 11);
    let intervals = write_file(dir.path(), "iv.txt", "# no artifacts today\n");
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--intervals",
        intervals.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let a = read_column(&input);
    let b = read_column(&output);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-7 * x.abs().max(1.0));
    }
    let sidecar = dir.path().join("out.txt.report.json");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(report["method"], "wqn");
    assert_eq!(report["stream"]["intervals"].as_array().unwrap().len(), 0);
}

#[test]
fn wqn_changes_only_the_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 2048, 13);
    let intervals = write_file(dir.path(), "iv.txt", "1.0 2.0\n");
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--intervals",
        intervals.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let a = read_column(&input);
    let b = read_column(&output);
    // 256 Hz default: the interval covers samples 256..512
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        let inside = (256..512).contains(&i);
        if !inside {
            assert!((x - y).abs() <= 1e-7 * x.abs().max(1.0), "sample {i} moved");
        }
    }
    assert!(
        a[256..512]
            .iter()
            .zip(&b[256..512])
            .any(|(x, y)| (x - y).abs() > 1e-9),
        "the artifact interval was not corrected"
    );
}

#[test]
fn lowpass_strips_most_white_noise_variance() {
    let dir = tempfile::tempdir().unwrap();
    // white noise rather than a walk: detail scales carry almost all energy
    let mut state = 99u64;
    let mut text = String::new();
    for _ in 0..2048 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let v = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        text.push_str(&format!("{v:.9}\n"));
    }
    let input = write_file(dir.path(), "noise.txt", &text);
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--method",
        "lowpass",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let var = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64
    };
    let a = read_column(&input);
    let b = read_column(&output);
    assert!(
        var(&b) < 0.1 * var(&a),
        "lowpass kept {} of {}",
        var(&b),
        var(&a)
    );
}

#[test]
fn bench_runs_a_tiny_config_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("records.csv");
    let json = dir.path().join("summary.json");
    let config = write_file(
        dir.path(),
        "bench.conf",
        &format!(
            "n_realizations = 3\nepoch_length = 256\nshapes = square\nmethods = lowpass, wqn\n\
             amplitudes = 2.0\ncsv = {}\njson = {}\n",
            csv.display(),
            json.display()
        ),
    );
    let out = run(&["bench", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("lowpass") && stdout.contains("wqn"), "table: {stdout}");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 3 * 2, "header plus one row per record");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(summary["aggregates"].as_array().unwrap().len() == 2);
}

#[test]
fn bench_reports_missing_and_malformed_configs_as_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bench", "--config", dir.path().join("absent.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("absent.conf"));

    let config = write_file(dir.path(), "bad.conf", "n_realizations = 3\nwhatever = 1\n");
    let out = run(&["bench", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr_line(&out);
    assert!(message.contains("line 2"), "got: {message}");
}

#[test]
fn sweep_requires_an_amplitude_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "bench.conf",
        "n_realizations = 2\nepoch_length = 256\namplitudes = 2.0\nmethods = lowpass\n",
    );
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("amplitudes"));
}

#[test]
fn seed_flag_changes_bench_results_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "bench.conf",
        "n_realizations = 2\nepoch_length = 256\nshapes = square\nmethods = lowpass\n",
    );
    let base: Vec<Output> = (0..2)
        .map(|_| run(&["bench", "--config", config.to_str().unwrap(), "--seed", "1"]))
        .collect();
    assert_eq!(base[0].stdout, base[1].stdout, "same seed, same table");
    let other = run(&["bench", "--config", config.to_str().unwrap(), "--seed", "2"]);
    assert_ne!(base[0].stdout, other.stdout, "different seed, different table");
}

#[test]
fn fit_ggd_reports_gaussian_noise_as_beta_two() {
    let dir = tempfile::tempdir().unwrap();
    // Box-Muller Gaussian white noise; orthogonal transforms keep it Gaussian
    let mut state = 4242u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut text = String::new();
    for _ in 0..4096 {
        let (u1, u2) = (next().max(1e-12), next());
        let g = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        text.push_str(&format!("{g:.9}\n"));
    }
    let input = write_file(dir.path(), "gauss.txt", &text);
    let out = run(&["fit-ggd", "--input", input.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    for scale in report["scales"].as_array().unwrap() {
        let beta = scale["beta"].as_f64().unwrap();
        assert!((beta - 2.0).abs() < 0.35, "scale {} beta {beta}", scale["scale"]);
    }
}

#[test]
fn fit_ggd_fails_cleanly_on_constant_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "flat.txt", &"1.0\n".repeat(512));
    let out = run(&["fit-ggd", "--input", input.to_str().unwrap(), "--levels", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let message = stderr_line(&out);
    assert!(message.starts_with("error:"), "got: {message}");
    assert!(message.contains("scale"), "got: {message}");
}

#[test]
fn psd_and_spectrogram_emit_parsable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 2048, 21);
    let out = run(&["psd", "--input", input.to_str().unwrap(), "--segment", "256"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frequency,power"));
    assert_eq!(lines.count(), 129, "256-point segments give 129 bins");

    let csv_path = dir.path().join("spec.csv");
    let out = run(&[
        "spectrogram",
        "--input",
        input.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
        "--window-seconds",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.lines().next().unwrap().split(',').count() == 3, "time,frequency,power rows");
    for line in text.lines().skip(1).take(5) {
        for field in line.split(',') {
            field.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn multi_column_input_is_rejected_for_single_channel_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "two.txt", &"0.5 0.25\n".repeat(600));
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--method",
        "lowpass",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("single-column"));
}

#[test]
fn overlapping_intervals_are_a_usage_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 2048, 5);
    let intervals = write_file(dir.path(), "iv.txt", "1.0 3.0\n2.0 4.0\n");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.path().join("out.txt").to_str().unwrap(),
        "--intervals",
        intervals.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr_line(&out);
    assert!(message.contains("iv.txt") && message.contains("overlap"), "got: {message}");
}

#[test]
fn universal_denoise_round_trips_epoched_thresholding() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_walk(dir.path(), "in.txt", 2048, 31);
    let intervals = write_file(dir.path(), "iv.txt", "2.0 3.0\n");
    let output = dir.path().join("out.txt");
    let out = run(&[
        "denoise",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--method",
        "universal",
        "--intervals",
        intervals.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_line(&out));
    let a = read_column(&input);
    let b = read_column(&output);
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        let inside = (512..768).contains(&i);
        if !inside {
            assert!((x - y).abs() <= 1e-7 * x.abs().max(1.0), "sample {i} moved");
        }
    }
}
