//! Artifact removal by quantile normalization of wavelet coefficient
//! amplitudes.
//!
//! An artifacted epoch and a clean reference epoch are both decomposed.
//! At each scale, the empirical distribution of coefficient amplitudes in
//! the artifacted epoch is transported onto the reference distribution:
//! a coefficient of amplitude `a` is remapped to
//! `min(a, Q_ref(F_art(a)))`, keeping its sign. Amplitudes the artifact
//! inflated are pulled back to where clean data of the same rank would sit,
//! while coefficients already consistent with the reference pass through
//! (the `min` makes the map attenuation-only). The corrected epoch is then
//! rebuilt by the inverse transform.
//!
//! [`correct_stream`] applies this epoch by epoch across a longer recording,
//! restricted to user-supplied artifact intervals, with a raised-cosine
//! crossfade just inside interval edges so splices do not click.

use serde::Serialize;

use crate::error::{invalid_input, Result};
use crate::signal::Signal;
use crate::stats;
use crate::wavelet::{
    decompose, default_levels, reconstruct, Boundary, WaveletDecomposition, WaveletSpec,
};

/// Empirical distribution of coefficient amplitudes at one scale.
///
/// Exposes both the raw counting CDF and the interpolated quantile view
/// built on plotting positions `p_i = (i - 0.5) / N` for the i-th smallest
/// amplitude. The interpolated view is what the transport map composes;
/// it is exact at observed amplitudes and clamps outside the sample range.
#[derive(Debug, Clone)]
pub struct EmpiricalAmplitudeCdf {
    sorted: Vec<f64>,
}

impl EmpiricalAmplitudeCdf {
    /// Builds the amplitude distribution `{|c_i|}` of a coefficient array.
    pub fn from_coefficients(coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid_input!("cannot build amplitude CDF from an empty array"));
        }
        if !stats::all_finite(coefficients) {
            return Err(invalid_input!("coefficient array contains non-finite values"));
        }
        let mut sorted: Vec<f64> = coefficients.iter().map(|c| c.abs()).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("amplitudes are finite"));
        Ok(EmpiricalAmplitudeCdf { sorted })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn min_amplitude(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max_amplitude(&self) -> f64 {
        *self.sorted.last().expect("cdf is never empty")
    }

    /// Sorted amplitudes backing the distribution.
    pub fn amplitudes(&self) -> &[f64] {
        &self.sorted
    }

    /// Counting CDF: the fraction of amplitudes strictly below `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&a| a < x);
        below as f64 / self.sorted.len() as f64
    }

    /// Interpolated plotting position of `x`, clamped to
    /// `[p_1, p_N] = [0.5/N, (N - 0.5)/N]`. At an observed amplitude this is
    /// the midpoint of the ranks tied at that value, so a later
    /// [`Self::quantile`] of the same distribution returns `x` itself.
    pub fn position(&self, x: f64) -> f64 {
        let n = self.sorted.len();
        let nf = n as f64;
        let below = self.sorted.partition_point(|&a| a < x);
        let at_or_below = self.sorted.partition_point(|&a| a <= x);
        if at_or_below == 0 {
            return 0.5 / nf;
        }
        if below == n {
            return (nf - 0.5) / nf;
        }
        if below < at_or_below {
            // x ties one or more samples: midpoint of their position range
            return (below + at_or_below) as f64 / (2.0 * nf);
        }
        // strictly between sorted[below - 1] and sorted[below]
        let left = self.sorted[below - 1];
        let right = self.sorted[below];
        let frac = (x - left) / (right - left);
        ((below as f64 - 0.5) + frac) / nf
    }

    /// Interpolated quantile at probability `p`, clamped to the observed
    /// amplitude range.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let nf = n as f64;
        let p = p.clamp(0.5 / nf, (nf - 0.5) / nf);
        let u = p * nf - 0.5;
        let i = u.floor() as usize;
        if i + 1 >= n {
            return self.sorted[n - 1];
        }
        let frac = u - i as f64;
        self.sorted[i] + frac * (self.sorted[i + 1] - self.sorted[i])
    }
}

/// Amplitude transport from a source distribution onto a target:
/// `T(a) = Q_target(F_source(a))`.
#[derive(Debug, Clone)]
pub struct TransportMap {
    source: EmpiricalAmplitudeCdf,
    target: EmpiricalAmplitudeCdf,
}

impl TransportMap {
    pub fn new(source: EmpiricalAmplitudeCdf, target: EmpiricalAmplitudeCdf) -> Self {
        TransportMap { source, target }
    }

    /// Transports one amplitude. Nondecreasing in `amplitude`; output lies
    /// within the target's observed amplitude range.
    pub fn apply(&self, amplitude: f64) -> f64 {
        self.target.quantile(self.source.position(amplitude))
    }

    pub fn source(&self) -> &EmpiricalAmplitudeCdf {
        &self.source
    }

    pub fn target(&self) -> &EmpiricalAmplitudeCdf {
        &self.target
    }
}

/// Remaps every coefficient amplitude through the source-to-target
/// transport, never increasing any amplitude and never changing a sign:
/// `c -> sign(c) * min(|c|, T(|c|))`.
///
/// Returns the corrected array and the map used.
pub fn normalize_coefficients(
    artifacted: &[f64],
    reference: &[f64],
) -> Result<(Vec<f64>, TransportMap)> {
    let source = EmpiricalAmplitudeCdf::from_coefficients(artifacted)?;
    let target = EmpiricalAmplitudeCdf::from_coefficients(reference)?;
    let map = TransportMap::new(source, target);
    let corrected = artifacted
        .iter()
        .map(|&c| {
            if c == 0.0 {
                return c;
            }
            let amplitude = c.abs();
            let remapped = amplitude.min(map.apply(amplitude));
            if c < 0.0 {
                -remapped
            } else {
                remapped
            }
        })
        .collect();
    Ok((corrected, map))
}

/// Amplitude quantile probes stored with correction reports.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmplitudeQuantiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl AmplitudeQuantiles {
    fn from_sorted(sorted: &[f64]) -> Self {
        AmplitudeQuantiles {
            q25: stats::sorted_quantile(sorted, 0.25),
            median: stats::sorted_quantile(sorted, 0.5),
            q75: stats::sorted_quantile(sorted, 0.75),
            max: stats::sorted_quantile(sorted, 1.0),
        }
    }
}

/// What happened to one scale during [`correct_epoch`].
#[derive(Debug, Clone)]
pub struct ScaleCorrection {
    /// Scale index: 1..=levels are details (finest first), levels + 1 is the
    /// approximation.
    pub scale: usize,
    pub map: TransportMap,
    /// Number of coefficients whose amplitude strictly decreased.
    pub attenuated: usize,
    pub total: usize,
    pub pre: AmplitudeQuantiles,
    pub post: AmplitudeQuantiles,
}

/// Per-scale record of one epoch correction.
#[derive(Debug, Clone)]
pub struct CorrectionReport {
    pub scales: Vec<ScaleCorrection>,
}

impl CorrectionReport {
    /// Total attenuated coefficients across scales.
    pub fn attenuated(&self) -> usize {
        self.scales.iter().map(|s| s.attenuated).sum()
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "attenuated": self.attenuated(),
            "scales": self.scales.iter().map(|s| {
                serde_json::json!({
                    "scale": s.scale,
                    "coefficients": s.total,
                    "attenuated": s.attenuated,
                    "pre": s.pre,
                    "post": s.post,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Corrects one artifacted epoch against a clean reference epoch.
///
/// Both epochs are decomposed with the same wavelet, depth, and boundary
/// mode (their lengths may differ). Every scale, including the
/// approximation, is quantile-normalized.
pub fn correct_epoch(
    artifacted: &[f64],
    reference: &[f64],
    wavelet: &WaveletSpec,
    levels: usize,
    boundary: Boundary,
) -> Result<(Vec<f64>, CorrectionReport)> {
    let dec_art = decompose(artifacted, wavelet, levels, boundary)?;
    let dec_ref = decompose(reference, wavelet, levels, boundary)?;
    let (corrected, report) = correct_decomposition(&dec_art, &dec_ref)?;
    Ok((reconstruct(&corrected)?, report))
}

/// Scale-by-scale quantile normalization of an already-decomposed epoch.
pub fn correct_decomposition(
    artifacted: &WaveletDecomposition,
    reference: &WaveletDecomposition,
) -> Result<(WaveletDecomposition, CorrectionReport)> {
    if artifacted.scale_count() != reference.scale_count() {
        return Err(invalid_input!(
            "artifact and reference decompositions have different depths ({} vs {})",
            artifacted.levels(),
            reference.levels()
        ));
    }
    let mut corrected_scales = Vec::with_capacity(artifacted.scale_count());
    let mut scales = Vec::with_capacity(artifacted.scale_count());
    for m in 1..=artifacted.scale_count() {
        let art = artifacted.scale(m)?;
        let reference_coeffs = reference.scale(m)?;
        let (out, map) = normalize_coefficients(art, reference_coeffs)?;
        let attenuated = art
            .iter()
            .zip(&out)
            .filter(|(a, b)| b.abs() < a.abs())
            .count();
        let mut post_sorted: Vec<f64> = out.iter().map(|c| c.abs()).collect();
        post_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite amplitudes"));
        scales.push(ScaleCorrection {
            scale: m,
            attenuated,
            total: art.len(),
            pre: AmplitudeQuantiles::from_sorted(map.source().amplitudes()),
            post: AmplitudeQuantiles::from_sorted(&post_sorted),
            map,
        });
        corrected_scales.push(out);
    }
    let mut queue = corrected_scales.into_iter();
    let corrected = artifacted.map_scales(|_, _| queue.next().expect("one array per scale"))?;
    Ok((corrected, CorrectionReport { scales }))
}

/// A time span in seconds, start inclusive, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub start_seconds: f64,
    pub end_seconds: f64,
}

impl Interval {
    pub fn new(start_seconds: f64, end_seconds: f64) -> Result<Self> {
        if !start_seconds.is_finite() || !end_seconds.is_finite() {
            return Err(invalid_input!("interval bounds must be finite"));
        }
        if end_seconds <= start_seconds {
            return Err(invalid_input!(
                "interval end {end_seconds} must exceed start {start_seconds}"
            ));
        }
        if start_seconds < 0.0 {
            return Err(invalid_input!("interval start {start_seconds} is negative"));
        }
        Ok(Interval { start_seconds, end_seconds })
    }
}

/// Settings for [`correct_stream`].
#[derive(Debug, Clone)]
pub struct StreamConfig {
    /// Epoch length in seconds.
    pub epoch_seconds: f64,
    /// Crossfade length as a fraction of the epoch, applied inside each
    /// interval edge (0 disables fading). Clamped to half the interval.
    pub crossfade_fraction: f64,
    /// Decomposition depth; `None` picks [`default_levels`] per epoch.
    pub levels: Option<usize>,
    pub boundary: Boundary,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            epoch_seconds: 2.0,
            crossfade_fraction: 1.0 / 16.0,
            levels: None,
            boundary: Boundary::Symmetric,
        }
    }
}

/// Record of one corrected epoch within a stream.
#[derive(Debug, Clone)]
pub struct EpochReport {
    pub epoch_index: usize,
    pub reference_epoch: usize,
    pub correction: Option<CorrectionReport>,
}

/// Sample-domain footprint of one requested interval.
#[derive(Debug, Clone)]
pub struct IntervalSpan {
    pub interval: Interval,
    pub start_sample: usize,
    pub end_sample: usize,
    /// Indices of the epochs overlapping this interval.
    pub epochs: Vec<usize>,
}

/// Everything [`correct_stream`] did, for reporting.
#[derive(Debug, Clone)]
pub struct StreamReport {
    pub epoch_samples: usize,
    pub epochs: Vec<EpochReport>,
    pub intervals: Vec<IntervalSpan>,
}

impl StreamReport {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "epoch_samples": self.epoch_samples,
            "intervals": self.intervals.iter().map(|span| serde_json::json!({
                "start_seconds": span.interval.start_seconds,
                "end_seconds": span.interval.end_seconds,
                "start_sample": span.start_sample,
                "end_sample": span.end_sample,
                "epochs": span.epochs,
            })).collect::<Vec<_>>(),
            "epochs": self.epochs.iter().map(|e| {
                let mut entry = serde_json::json!({
                    "epoch": e.epoch_index,
                    "reference_epoch": e.reference_epoch,
                });
                if let Some(correction) = &e.correction {
                    entry["correction"] = correction.summary_json();
                }
                entry
            }).collect::<Vec<_>>(),
        })
    }
}

/// Corrects the artifact intervals of a longer recording epoch by epoch,
/// using quantile normalization against the nearest clean epoch.
pub fn correct_stream(
    signal: &Signal,
    intervals: &[Interval],
    wavelet: &WaveletSpec,
    config: &StreamConfig,
) -> Result<(Signal, StreamReport)> {
    process_stream(signal, intervals, wavelet, config, |artifact, reference, levels| {
        let (samples, report) =
            correct_epoch(artifact, reference, wavelet, levels, config.boundary)?;
        Ok((samples, Some(report)))
    })
}

/// Epoch-splitting, reference-selection, and splicing engine behind
/// [`correct_stream`], generic over how a single epoch is corrected.
///
/// `correct` receives the artifacted epoch, the chosen clean reference
/// epoch, and the decomposition depth to use; it returns the full corrected
/// epoch. Corrected samples are spliced only inside the given intervals,
/// with a raised-cosine crossfade inside each interval edge; all other
/// samples are returned untouched.
pub fn process_stream<F>(
    signal: &Signal,
    intervals: &[Interval],
    wavelet: &WaveletSpec,
    config: &StreamConfig,
    mut correct: F,
) -> Result<(Signal, StreamReport)>
where
    F: FnMut(&[f64], &[f64], usize) -> Result<(Vec<f64>, Option<CorrectionReport>)>,
{
    let n = signal.len();
    let rate = signal.sampling_rate();
    if n == 0 {
        return Err(invalid_input!("signal is empty"));
    }
    if !config.epoch_seconds.is_finite() || config.epoch_seconds <= 0.0 {
        return Err(invalid_input!("epoch length must be positive seconds"));
    }
    if !(0.0..=0.5).contains(&config.crossfade_fraction) {
        return Err(invalid_input!("crossfade fraction must lie in [0, 0.5]"));
    }
    let epoch_samples = (config.epoch_seconds * rate).round() as usize;
    if epoch_samples < 2 {
        return Err(invalid_input!(
            "epoch of {} seconds at {} Hz is shorter than 2 samples",
            config.epoch_seconds,
            rate
        ));
    }

    // validate and sort intervals, then map to sample spans
    let duration = signal.duration();
    let mut sorted: Vec<Interval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        let checked = Interval::new(iv.start_seconds, iv.end_seconds)?;
        if checked.end_seconds > duration * (1.0 + 1e-12) {
            return Err(invalid_input!(
                "interval [{}, {}) extends past the signal end ({duration} s)",
                checked.start_seconds,
                checked.end_seconds
            ));
        }
        sorted.push(checked);
    }
    sorted.sort_by(|a, b| {
        a.start_seconds
            .partial_cmp(&b.start_seconds)
            .expect("interval bounds are finite")
    });
    for pair in sorted.windows(2) {
        if pair[1].start_seconds < pair[0].end_seconds {
            return Err(invalid_input!(
                "intervals [{}, {}) and [{}, {}) overlap",
                pair[0].start_seconds,
                pair[0].end_seconds,
                pair[1].start_seconds,
                pair[1].end_seconds
            ));
        }
    }
    let spans: Vec<(usize, usize)> = sorted
        .iter()
        .map(|iv| {
            let start = ((iv.start_seconds * rate).floor() as usize).min(n);
            let end = ((iv.end_seconds * rate).ceil() as usize).min(n);
            (start, end)
        })
        .collect();

    let epoch_count = n.div_ceil(epoch_samples);
    let epoch_range = |e: usize| (e * epoch_samples, ((e + 1) * epoch_samples).min(n));
    let overlaps = |e: usize| {
        let (lo, hi) = epoch_range(e);
        spans.iter().any(|&(s, t)| s < hi && lo < t)
    };

    let artifacted: Vec<usize> = (0..epoch_count).filter(|&e| overlaps(e)).collect();
    let clean: Vec<bool> = (0..epoch_count).map(|e| !overlaps(e)).collect();

    if artifacted.is_empty() {
        // nothing to do: output equals input
        let report = StreamReport {
            epoch_samples,
            epochs: Vec::new(),
            intervals: sorted
                .iter()
                .zip(&spans)
                .map(|(iv, &(s, t))| IntervalSpan {
                    interval: *iv,
                    start_sample: s,
                    end_sample: t,
                    epochs: Vec::new(),
                })
                .collect(),
        };
        return Ok((signal.clone(), report));
    }

    let feasible_levels = |len: usize| -> usize {
        match config.levels {
            Some(l) => l,
            None => default_levels(len, wavelet, config.boundary),
        }
    };
    let epoch_feasible = |e: usize, levels: usize| {
        let (lo, hi) = epoch_range(e);
        levels >= 1 && default_levels_possible(hi - lo, wavelet.filter_len(), levels, config.boundary)
    };

    // corrected track: original samples with artifacted epochs replaced
    let mut track = signal.samples().to_vec();
    let mut epoch_reports = Vec::new();
    for &e in &artifacted {
        let (lo, hi) = epoch_range(e);
        let levels = feasible_levels(hi - lo);
        if levels == 0 || !epoch_feasible(e, levels) {
            return Err(invalid_input!(
                "epoch {e} ({} samples) cannot be decomposed {} level(s) with {}",
                hi - lo,
                levels.max(1),
                wavelet.name()
            ));
        }
        let reference = find_reference(e, &clean, |r| epoch_feasible(r, levels)).ok_or_else(
            || invalid_input!("no clean reference epoch available for artifacted epoch {e}"),
        )?;
        let (rlo, rhi) = epoch_range(reference);
        let (corrected, correction) =
            correct(&signal.samples()[lo..hi], &signal.samples()[rlo..rhi], levels)?;
        if corrected.len() != hi - lo {
            return Err(invalid_input!(
                "corrected epoch {e} has {} samples, expected {}",
                corrected.len(),
                hi - lo
            ));
        }
        track[lo..hi].copy_from_slice(&corrected);
        epoch_reports.push(EpochReport {
            epoch_index: e,
            reference_epoch: reference,
            correction,
        });
    }

    // splice the corrected track into the output inside each interval only
    let fade = ((epoch_samples as f64) * config.crossfade_fraction).round() as usize;
    let mut out = signal.samples().to_vec();
    for &(s, t) in &spans {
        if s >= t {
            continue;
        }
        let len = t - s;
        let fade_len = fade.min(len / 2);
        for i in s..t {
            let from_start = i - s;
            let from_end = t - 1 - i;
            let w = fade_weight(from_start, fade_len) * fade_weight(from_end, fade_len);
            out[i] = (1.0 - w) * out[i] + w * track[i];
        }
    }

    let report = StreamReport {
        epoch_samples,
        epochs: epoch_reports,
        intervals: sorted
            .iter()
            .zip(&spans)
            .map(|(iv, &(s, t))| IntervalSpan {
                interval: *iv,
                start_sample: s,
                end_sample: t,
                epochs: artifacted
                    .iter()
                    .copied()
                    .filter(|&e| {
                        let (lo, hi) = epoch_range(e);
                        s < hi && lo < t
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok((signal.with_samples(out)?, report))
}

/// Raised-cosine ramp: 0 just outside the fade, approaching 1 across it.
fn fade_weight(distance_from_edge: usize, fade_len: usize) -> f64 {
    if fade_len == 0 || distance_from_edge >= fade_len {
        return 1.0;
    }
    let t = (distance_from_edge + 1) as f64 / (fade_len + 1) as f64;
    0.5 * (1.0 - (std::f64::consts::PI * t).cos())
}

/// Nearest preceding clean feasible epoch, else nearest following.
fn find_reference(
    epoch: usize,
    clean: &[bool],
    feasible: impl Fn(usize) -> bool,
) -> Option<usize> {
    for r in (0..epoch).rev() {
        if clean[r] && feasible(r) {
            return Some(r);
        }
    }
    for (r, &is_clean) in clean.iter().enumerate().skip(epoch + 1) {
        if is_clean && feasible(r) {
            return Some(r);
        }
    }
    None
}

/// True when `len` supports `levels` analysis steps.
fn default_levels_possible(
    len: usize,
    filter_len: usize,
    levels: usize,
    boundary: Boundary,
) -> bool {
    let mut current = len;
    for _ in 0..levels {
        if current < filter_len {
            return false;
        }
        current = match boundary {
            Boundary::Symmetric => (current + filter_len - 1) / 2,
            Boundary::Periodic => current.div_ceil(2),
        };
    }
    true
}
