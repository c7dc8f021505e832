//! Quantitative evaluation: reconstruction error, distribution distances,
//! spectral estimates with 1/f^alpha fitting, generalized Gaussian fits,
//! histograms, and spectrograms.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{invalid_input, Error, Result};
use crate::signal::Signal;
use crate::stats;
use crate::wavelet::WaveletDecomposition;

/// Mean squared difference between two equal-length signals.
pub fn mse(a: &Signal, b: &Signal) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid_input!(
            "length mismatch: {} vs {} samples",
            a.len(),
            b.len()
        ));
    }
    if a.is_empty() {
        return Err(invalid_input!("mse of empty signals is undefined"));
    }
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// Wasserstein-1 distance between the empirical distributions of two
/// samples: the integral of |F_p - F_q|. For equal sample sizes this
/// equals the mean absolute difference of the sorted samples.
pub fn wasserstein1(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(invalid_input!("wasserstein distance needs nonempty samples"));
    }
    if !stats::all_finite(p) || !stats::all_finite(q) {
        return Err(invalid_input!("wasserstein distance needs finite samples"));
    }
    let mut ps = p.to_vec();
    let mut qs = q.to_vec();
    ps.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    qs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mut all = Vec::with_capacity(ps.len() + qs.len());
    all.extend_from_slice(&ps);
    all.extend_from_slice(&qs);
    all.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let np = ps.len() as f64;
    let nq = qs.len() as f64;
    let mut acc = 0.0;
    for w in all.windows(2) {
        let delta = w[1] - w[0];
        if delta == 0.0 {
            continue;
        }
        let fp = ps.partition_point(|&x| x <= w[0]) as f64 / np;
        let fq = qs.partition_point(|&x| x <= w[0]) as f64 / nq;
        acc += (fp - fq).abs() * delta;
    }
    Ok(acc)
}

fn avg_wasserstein_by(
    restored: &WaveletDecomposition,
    original: &WaveletDecomposition,
    map: fn(f64) -> f64,
) -> Result<f64> {
    if restored.levels() != original.levels()
        || restored.original_length() != original.original_length()
    {
        return Err(invalid_input!("decomposition structures differ"));
    }
    let scales = restored.scale_count();
    let mut acc = 0.0;
    for m in 1..=scales {
        let a = restored.scale(m)?;
        let b = original.scale(m)?;
        if a.len() != b.len() {
            return Err(invalid_input!(
                "decomposition structures differ at scale {m}: {} vs {} coefficients",
                a.len(),
                b.len()
            ));
        }
        let ma: Vec<f64> = a.iter().map(|&v| map(v)).collect();
        let mb: Vec<f64> = b.iter().map(|&v| map(v)).collect();
        acc += wasserstein1(&ma, &mb)?;
    }
    Ok(acc / scales as f64)
}

/// Mean over all scales (details and approximation) of the Wasserstein-1
/// distance between signed coefficient distributions.
pub fn avg_coefficient_wasserstein(
    restored: &WaveletDecomposition,
    original: &WaveletDecomposition,
) -> Result<f64> {
    avg_wasserstein_by(restored, original, |v| v)
}

/// Same scale-averaged distance computed on coefficient magnitudes.
pub fn avg_amplitude_wasserstein(
    restored: &WaveletDecomposition,
    original: &WaveletDecomposition,
) -> Result<f64> {
    avg_wasserstein_by(restored, original, f64::abs)
}

/// Welch estimator settings. `segment_length` of `None` picks the power of
/// two nearest to a one-eighth split of the signal, never below 8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdConfig {
    pub segment_length: Option<usize>,
    pub overlap_fraction: f64,
}

impl Default for PsdConfig {
    fn default() -> Self {
        PsdConfig { segment_length: None, overlap_fraction: 0.5 }
    }
}

/// One-sided power spectral density estimate.
#[derive(Debug, Clone, Serialize)]
pub struct PsdEstimate {
    frequencies: Vec<f64>,
    power: Vec<f64>,
    segment_length: usize,
    overlap_fraction: f64,
    window: &'static str,
}

impl PsdEstimate {
    pub fn new(
        frequencies: Vec<f64>,
        power: Vec<f64>,
        segment_length: usize,
        overlap_fraction: f64,
    ) -> Result<PsdEstimate> {
        if frequencies.len() != power.len() {
            return Err(invalid_input!("frequency and power arrays differ in length"));
        }
        if frequencies.is_empty() {
            return Err(invalid_input!("empty spectrum"));
        }
        if !frequencies.windows(2).all(|w| w[1] > w[0]) {
            return Err(invalid_input!("frequencies must be strictly increasing"));
        }
        if power.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(invalid_input!("power values must be finite and nonnegative"));
        }
        Ok(PsdEstimate { frequencies, power, segment_length, overlap_fraction, window: "hann" })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.overlap_fraction
    }

    pub fn window(&self) -> &'static str {
        self.window
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency,power\n");
        for (f, p) in self.frequencies.iter().zip(&self.power) {
            out.push_str(&format!("{f:.8e},{p:.8e}\n"));
        }
        out
    }
}

fn nearest_power_of_two(target: f64) -> usize {
    if target <= 1.0 {
        return 1;
    }
    let exp = target.log2().round() as u32;
    1usize << exp.min(62)
}

fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / len as f64).cos()))
        .collect()
}

/// Detrends, windows, and transforms one segment, accumulating one-sided
/// squared magnitudes into `acc` (length seg/2 + 1).
fn accumulate_segment(
    segment: &[f64],
    window: &[f64],
    fft: &dyn Fft<f64>,
    buffer: &mut Vec<Complex<f64>>,
    acc: &mut [f64],
) {
    let mean = stats::mean(segment);
    buffer.clear();
    buffer.extend(
        segment
            .iter()
            .zip(window)
            .map(|(&x, &w)| Complex::new((x - mean) * w, 0.0)),
    );
    fft.process(buffer);
    for (k, slot) in acc.iter_mut().enumerate() {
        *slot += buffer[k].norm_sqr();
    }
}

/// Averaged-periodogram (Welch) spectral density with a Hann window and
/// per-segment mean removal. One-sided: interior bins carry both halves
/// of the spectrum.
pub fn psd(signal: &Signal, config: &PsdConfig) -> Result<PsdEstimate> {
    let n = signal.len();
    let fs = signal.sampling_rate();
    if !(0.0..1.0).contains(&config.overlap_fraction) {
        return Err(invalid_input!(
            "overlap fraction must be in [0, 1), got {}",
            config.overlap_fraction
        ));
    }
    let seg = match config.segment_length {
        Some(s) => {
            if s < 8 || s % 2 != 0 {
                return Err(invalid_input!("segment length must be even and at least 8, got {s}"));
            }
            s
        }
        None => nearest_power_of_two(n as f64 / 8.0).max(8),
    };
    if n < seg {
        return Err(invalid_input!("signal of {n} samples is shorter than one {seg}-sample segment"));
    }
    let hop = (seg - (seg as f64 * config.overlap_fraction).floor() as usize).max(1);
    let window = hann_window(seg);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(seg);
    let mut buffer = Vec::with_capacity(seg);
    let mut acc = vec![0.0; seg / 2 + 1];
    let x = signal.samples();
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + seg <= n {
        accumulate_segment(&x[start..start + seg], &window, fft.as_ref(), &mut buffer, &mut acc);
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (segments as f64 * fs * window_power);
    let last = acc.len() - 1;
    let power: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let one_sided = if k == 0 || k == last { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let frequencies = (0..=seg / 2).map(|k| k as f64 * fs / seg as f64).collect();
    PsdEstimate::new(frequencies, power, seg, config.overlap_fraction)
}

/// Power-law fit of a spectrum: power ~ 1/f^alpha over a frequency band,
/// with the self-similarity index hurst = (alpha - 1) / 2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HurstFit {
    pub alpha: f64,
    pub hurst: f64,
    pub r_squared: f64,
    pub bins_used: usize,
}

/// Least-squares line through (ln f, ln power) over `band`; alpha is the
/// negated slope. Flat spectra give alpha 0 and hurst -0.5.
pub fn hurst_from_psd(estimate: &PsdEstimate, band: (f64, f64)) -> Result<HurstFit> {
    let (lo, hi) = band;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(invalid_input!("fit band [{lo}, {hi}] is not a valid frequency range"));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&f, &p) in estimate.frequencies().iter().zip(estimate.power()) {
        if f > 0.0 && f >= lo && f <= hi {
            if p <= 0.0 {
                return Err(invalid_input!("nonpositive power {p} at {f} Hz inside the fit band"));
            }
            lx.push(f.ln());
            ly.push(p.ln());
        }
    }
    if lx.len() < 8 {
        return Err(invalid_input!(
            "fit band [{lo}, {hi}] covers only {} bins; need at least 8",
            lx.len()
        ));
    }
    let mx = stats::mean(&lx);
    let my = stats::mean(&ly);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let alpha = -slope;
    Ok(HurstFit { alpha, hurst: (alpha - 1.0) / 2.0, r_squared, bins_used: lx.len() })
}

/// Default power-law fit band for a signal: above the lowest resolvable
/// cycles, below the Nyquist rolloff.
pub fn default_fit_band(length: usize, sampling_rate: f64) -> (f64, f64) {
    (4.0 * sampling_rate / length as f64, sampling_rate / 4.0)
}

/// Zero-mean generalized Gaussian maximum-likelihood fit:
/// density beta / (2 alpha Gamma(1/beta)) exp(-(|x|/alpha)^beta).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GgdFit {
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
}

/// Generalized Gaussian density at `x` for scale `alpha`, shape `beta`.
pub fn ggd_density(x: f64, alpha: f64, beta: f64) -> f64 {
    let norm = beta / (2.0 * alpha * ln_gamma(1.0 / beta).exp());
    norm * (-(x.abs() / alpha).powf(beta)).exp()
}

/// Mean of |x|^beta and mean of |x|^beta ln|x| (zero samples contribute
/// zero to both, matching the limit).
fn abs_moments(xs: &[f64], beta: f64) -> (f64, f64) {
    let mut m = 0.0;
    let mut md = 0.0;
    for &x in xs {
        let a = x.abs();
        if a > 0.0 {
            let p = a.powf(beta);
            m += p;
            md += p * a.ln();
        }
    }
    let n = xs.len() as f64;
    (m / n, md / n)
}

/// Per-sample derivative of the profile log-likelihood in beta, with the
/// scale maximized out as alpha^beta = beta * mean|x|^beta.
fn profile_gradient(xs: &[f64], beta: f64) -> f64 {
    let (m, md) = abs_moments(xs, beta);
    1.0 / beta + (1.0 / (beta * beta)) * ((beta * m).ln() + digamma(1.0 / beta))
        - md / (beta * m)
}

/// Generalized Gaussian kurtosis ratio Gamma(1/b) Gamma(5/b) / Gamma(3/b)^2,
/// strictly decreasing in b.
fn ggd_kurtosis(beta: f64) -> f64 {
    (ln_gamma(1.0 / beta) + ln_gamma(5.0 / beta) - 2.0 * ln_gamma(3.0 / beta)).exp()
}

const BETA_MIN: f64 = 0.1;
const BETA_MAX: f64 = 10.0;

fn beta_from_kurtosis(kurtosis: f64) -> f64 {
    let (mut lo, mut hi) = (BETA_MIN * 1.5, BETA_MAX * 0.9);
    let k = kurtosis.clamp(ggd_kurtosis(hi) + 1e-9, ggd_kurtosis(lo) - 1e-9);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if ggd_kurtosis(mid) > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Fits the zero-mean generalized Gaussian by maximum likelihood. The shape
/// is found by root-finding on the profile-likelihood gradient, seeded by a
/// kurtosis-matching estimate; the scale then follows in closed form.
pub fn fit_generalized_gaussian(samples: &[f64]) -> Result<GgdFit> {
    if samples.len() < 16 {
        return Err(invalid_input!(
            "generalized Gaussian fit needs at least 16 samples, got {}",
            samples.len()
        ));
    }
    if !stats::all_finite(samples) {
        return Err(invalid_input!("generalized Gaussian fit needs finite samples"));
    }
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return Err(invalid_input!("degenerate sample: all values equal"));
    }
    let n = samples.len() as f64;
    let m2 = samples.iter().map(|x| x * x).sum::<f64>() / n;
    let m4 = samples.iter().map(|x| x.powi(4)).sum::<f64>() / n;
    let beta0 = beta_from_kurtosis(m4 / (m2 * m2));

    // bracket a sign change of the gradient around the seed
    let mut lo = (beta0 / 2.0).max(BETA_MIN + 1e-9);
    let mut hi = (beta0 * 2.0).min(BETA_MAX - 1e-9);
    let mut glo = profile_gradient(samples, lo);
    let mut ghi = profile_gradient(samples, hi);
    for _ in 0..60 {
        if glo * ghi <= 0.0 {
            break;
        }
        if lo > BETA_MIN + 1e-9 {
            lo = (lo / 2.0).max(BETA_MIN + 1e-9);
            glo = profile_gradient(samples, lo);
        }
        if glo * ghi <= 0.0 {
            break;
        }
        if hi < BETA_MAX - 1e-9 {
            hi = (hi * 2.0).min(BETA_MAX - 1e-9);
            ghi = profile_gradient(samples, hi);
        }
        if lo <= BETA_MIN + 1e-9 && hi >= BETA_MAX - 1e-9 {
            break;
        }
    }
    if glo * ghi > 0.0 {
        return Err(Error::NonConvergence(format!(
            "no likelihood maximum for the shape parameter inside ({BETA_MIN}, {BETA_MAX})"
        )));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = profile_gradient(samples, mid);
        if glo * gm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    let beta = 0.5 * (lo + hi);
    let total_gradient = n * profile_gradient(samples, beta);
    if total_gradient.abs() > 1e-8 {
        return Err(Error::NonConvergence(format!(
            "profile gradient {total_gradient:.3e} above tolerance at shape {beta:.6}"
        )));
    }
    let (m, _) = abs_moments(samples, beta);
    let alpha = (beta * m).powf(1.0 / beta);
    let loglik =
        n * (beta.ln() - 2.0_f64.ln() - alpha.ln() - ln_gamma(1.0 / beta)) - n / beta;
    Ok(GgdFit { alpha, beta, loglik })
}

/// Equal-width histogram normalized as a density.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<usize>,
    density: Vec<f64>,
}

impl Histogram {
    /// Bin boundaries; one more entry than bins.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Counts scaled so that sum(density * width) = 1.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count,density\n");
        for (i, (&c, &d)) in self.counts.iter().zip(&self.density).enumerate() {
            out.push_str(&format!(
                "{:.8e},{:.8e},{c},{d:.8e}\n",
                self.edges[i],
                self.edges[i + 1]
            ));
        }
        out
    }
}

/// Histogram over `range` (defaults to the data range; a degenerate range
/// is widened by half a unit each side). Values outside the range are
/// dropped; the density normalizes over the values kept.
pub fn histogram(values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins == 0 {
        return Err(invalid_input!("histogram needs at least one bin"));
    }
    if values.is_empty() {
        return Err(invalid_input!("histogram of an empty sample"));
    }
    if !stats::all_finite(values) {
        return Err(invalid_input!("histogram needs finite values"));
    }
    let (mut lo, mut hi) = match range {
        Some((lo, hi)) => {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(invalid_input!("invalid histogram range [{lo}, {hi}]"));
            }
            (lo, hi)
        }
        None => {
            let lo = values.iter().cloned().fold(f64::MAX, f64::min);
            let hi = values.iter().cloned().fold(f64::MIN, f64::max);
            (lo, hi)
        }
    };
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut kept = 0usize;
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let idx = (((v - lo) / (hi - lo)) * bins as f64) as usize;
        counts[idx.min(bins - 1)] += 1;
        kept += 1;
    }
    if kept == 0 {
        return Err(invalid_input!("no values fall inside the histogram range"));
    }
    let density = counts
        .iter()
        .map(|&c| c as f64 / (kept as f64 * width))
        .collect();
    let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram { edges, counts, density })
}

/// Density histogram of the coefficients at one scale of a decomposition.
pub fn coefficient_histogram(
    decomposition: &WaveletDecomposition,
    scale: usize,
    bins: usize,
) -> Result<Histogram> {
    histogram(decomposition.scale(scale)?, bins, None)
}

/// Short-time spectral estimate: one density spectrum per window position.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrogramEstimate {
    times: Vec<f64>,
    frequencies: Vec<f64>,
    /// One row per entry of `times`, each of `frequencies.len()` powers.
    power: Vec<Vec<f64>>,
    window_length: usize,
    overlap_fraction: f64,
    window: &'static str,
}

impl SpectrogramEstimate {
    /// Window-center times in seconds.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// power()[t][k] is the density at times()[t], frequencies()[k].
    pub fn power(&self) -> &[Vec<f64>] {
        &self.power
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.overlap_fraction
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,frequency,power\n");
        for (t, row) in self.times.iter().zip(&self.power) {
            for (f, p) in self.frequencies.iter().zip(row) {
                out.push_str(&format!("{t:.8e},{f:.8e},{p:.8e}\n"));
            }
        }
        out
    }
}

/// Hann-windowed short-time Fourier power with per-window mean removal,
/// scaled like the spectral density estimator.
pub fn spectrogram(
    signal: &Signal,
    window_seconds: f64,
    overlap_fraction: f64,
) -> Result<SpectrogramEstimate> {
    let fs = signal.sampling_rate();
    if !window_seconds.is_finite() || window_seconds <= 0.0 {
        return Err(invalid_input!("window must be a positive duration, got {window_seconds} s"));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(invalid_input!("overlap fraction must be in [0, 1), got {overlap_fraction}"));
    }
    let win = (window_seconds * fs).round() as usize;
    if win < 2 {
        return Err(invalid_input!("window of {window_seconds} s covers fewer than 2 samples"));
    }
    if win > signal.len() {
        return Err(invalid_input!(
            "window of {win} samples is longer than the {}-sample signal",
            signal.len()
        ));
    }
    let hop = ((win as f64 * (1.0 - overlap_fraction)).round() as usize).max(1);
    let window = hann_window(win);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(win);
    let mut buffer = Vec::with_capacity(win);
    let x = signal.samples();
    let scale = 1.0 / (fs * window_power);
    let half = win / 2;
    let mut times = Vec::new();
    let mut power = Vec::new();
    let mut start = 0usize;
    while start + win <= x.len() {
        let mut acc = vec![0.0; half + 1];
        accumulate_segment(&x[start..start + win], &window, fft.as_ref(), &mut buffer, &mut acc);
        let row: Vec<f64> = acc
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let one_sided = if k == 0 || (win % 2 == 0 && k == half) { 1.0 } else { 2.0 };
                a * scale * one_sided
            })
            .collect();
        times.push((start as f64 + win as f64 / 2.0) / fs);
        power.push(row);
        start += hop;
    }
    let frequencies = (0..=half).map(|k| k as f64 * fs / win as f64).collect();
    Ok(SpectrogramEstimate {
        times,
        frequencies,
        power,
        window_length: win,
        overlap_fraction,
        window: "hann",
    })
}
