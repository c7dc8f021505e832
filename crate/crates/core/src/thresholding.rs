//! Threshold-based artifact suppression baselines.
//!
//! Unlike classic denoising, the artifact here is the large-amplitude part,
//! so both operators act on coefficients from above:
//!
//! * hard: keep `w` when `|w| < theta`, else zero it;
//! * soft: clip to `sign(w) * min(|w|, theta)`.
//!
//! Three selectors produce per-scale thresholds: oracle-optimal ones that
//! minimize the distance to a known clean decomposition ([`ideal_thresholds`]),
//! the universal rule `sigma * sqrt(2 ln N)` ([`universal_thresholds`]), and a
//! Stein-risk minimizer with a sparsity fallback ([`sure_thresholds`]).
//! [`lowpass_baseline`] drops every detail scale outright.

use crate::error::{invalid_input, Result};
use crate::wavelet::WaveletDecomposition;

/// Which operator a [`ThresholdSpec`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    Hard,
    Soft,
}

/// Per-scale thresholds plus the operator to apply them with.
/// `per_scale[i]` belongs to scale `i + 1` (finest detail first, the last
/// entry is the approximation).
#[derive(Debug, Clone)]
pub struct ThresholdSpec {
    pub method: ThresholdMethod,
    pub per_scale: Vec<f64>,
}

impl ThresholdSpec {
    /// Copy with the approximation scale made pass-through.
    pub fn without_approximation(&self) -> ThresholdSpec {
        let mut spec = self.clone();
        if let Some(last) = spec.per_scale.last_mut() {
            *last = f64::INFINITY;
        }
        spec
    }
}

/// Keeps small coefficients, zeroes the rest: `w * 1[|w| < theta]`.
/// A coefficient exactly at the threshold is zeroed.
pub fn apply_hard(w: f64, theta: f64) -> f64 {
    if w.abs() < theta {
        w
    } else {
        0.0
    }
}

/// Clips amplitude at the threshold: `sign(w) * min(|w|, theta)`.
pub fn apply_soft(w: f64, theta: f64) -> f64 {
    if w.abs() <= theta {
        w
    } else if w < 0.0 {
        -theta
    } else {
        theta
    }
}

fn apply_one(method: ThresholdMethod, w: f64, theta: f64) -> f64 {
    match method {
        ThresholdMethod::Hard => apply_hard(w, theta),
        ThresholdMethod::Soft => apply_soft(w, theta),
    }
}

/// Applies a per-scale threshold spec to every coefficient array.
pub fn apply_thresholds(
    decomposition: &WaveletDecomposition,
    spec: &ThresholdSpec,
) -> Result<WaveletDecomposition> {
    if spec.per_scale.len() != decomposition.scale_count() {
        return Err(invalid_input!(
            "threshold spec has {} entries for {} scales",
            spec.per_scale.len(),
            decomposition.scale_count()
        ));
    }
    for (i, t) in spec.per_scale.iter().enumerate() {
        if t.is_nan() || *t < 0.0 {
            return Err(invalid_input!("threshold for scale {} is invalid: {t}", i + 1));
        }
    }
    decomposition.map_scales(|m, coeffs| {
        let theta = spec.per_scale[m - 1];
        coeffs.iter().map(|&w| apply_one(spec.method, w, theta)).collect()
    })
}

/// Zeros every detail scale and keeps the approximation: the crudest
/// frequency-selective baseline.
pub fn lowpass_baseline(decomposition: &WaveletDecomposition) -> WaveletDecomposition {
    let approx_scale = decomposition.scale_count();
    decomposition
        .map_scales(|m, coeffs| {
            if m == approx_scale {
                coeffs.to_vec()
            } else {
                vec![0.0; coeffs.len()]
            }
        })
        .expect("identity-shaped mapping cannot fail")
}

/// Population standard deviation of each coefficient array, finest detail
/// first, approximation last.
pub fn scale_std(decomposition: &WaveletDecomposition) -> Vec<f64> {
    (1..=decomposition.scale_count())
        .map(|m| {
            crate::stats::population_std(
                decomposition.scale(m).expect("scale index within count"),
            )
        })
        .collect()
}

/// Robust noise scale per coefficient array: median absolute deviation
/// around the median, scaled to estimate a Gaussian sigma.
pub fn scale_mad_sigma(decomposition: &WaveletDecomposition) -> Vec<f64> {
    (1..=decomposition.scale_count())
        .map(|m| {
            crate::stats::mad_std(decomposition.scale(m).expect("scale index within count"))
        })
        .collect()
}

/// Clean decomposition an oracle selector compares against.
pub struct OracleContext<'a> {
    pub clean: &'a WaveletDecomposition,
}

/// Per-scale thresholds minimizing the squared distance between the
/// thresholded coefficients and the clean ones. Exact: the objective is
/// piecewise constant (hard) or piecewise quadratic (soft) in the threshold,
/// so scanning segment endpoints and vertices finds the global minimum.
pub fn ideal_thresholds(
    artifacted: &WaveletDecomposition,
    oracle: &OracleContext<'_>,
    method: ThresholdMethod,
) -> Result<ThresholdSpec> {
    let clean = oracle.clean;
    if clean.scale_count() != artifacted.scale_count() {
        return Err(invalid_input!(
            "clean and artifacted decompositions have different depths ({} vs {})",
            clean.levels(),
            artifacted.levels()
        ));
    }
    let mut per_scale = Vec::with_capacity(artifacted.scale_count());
    for m in 1..=artifacted.scale_count() {
        let w = artifacted.scale(m)?;
        let x = clean.scale(m)?;
        if w.len() != x.len() {
            return Err(invalid_input!(
                "scale {m}: artifacted has {} coefficients, clean has {}",
                w.len(),
                x.len()
            ));
        }
        let theta = match method {
            ThresholdMethod::Hard => ideal_hard_scale(w, x),
            ThresholdMethod::Soft => ideal_soft_scale(w, x),
        };
        per_scale.push(theta);
    }
    Ok(ThresholdSpec { method, per_scale })
}

fn ideal_hard_scale(w: &[f64], x: &[f64]) -> f64 {
    // sort by amplitude; obj(theta) = sum[|w| < theta] (w-x)^2 + sum[|w| >= theta] x^2
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&i, &j| w[i].abs().partial_cmp(&w[j].abs()).expect("finite coefficients"));
    let keep_cost: Vec<f64> = order.iter().map(|&i| (w[i] - x[i]) * (w[i] - x[i])).collect();
    let zero_cost: Vec<f64> = order.iter().map(|&i| x[i] * x[i]).collect();
    let amplitudes: Vec<f64> = order.iter().map(|&i| w[i].abs()).collect();

    let total_zero: f64 = zero_cost.iter().sum();
    // obj with the j smallest amplitudes kept
    let mut best_theta = 0.0;
    let mut best_obj = total_zero; // j = 0, theta = 0
    let mut running = total_zero;
    let n = w.len();
    let mut j = 0;
    while j < n {
        // advance over the tie group; theta just above amplitudes[j] keeps all ties
        let mut k = j;
        while k < n && amplitudes[k] == amplitudes[j] {
            running += keep_cost[k] - zero_cost[k];
            k += 1;
        }
        // a threshold realizing "keep the k smallest": the next distinct
        // amplitude, or anything above the maximum when k == n
        let theta = if k < n { amplitudes[k] } else { amplitudes[n - 1].next_up() };
        if running < best_obj {
            best_obj = running;
            best_theta = theta;
        }
        j = k;
    }
    best_theta
}

fn ideal_soft_scale(w: &[f64], x: &[f64]) -> f64 {
    // obj(theta) = sum[|w| <= theta] (w-x)^2
    //            + sum[|w| > theta] (theta^2 - 2 theta sign(w) x + x^2)
    // piecewise quadratic between sorted amplitudes; check each segment's
    // left endpoint and interior vertex
    let n = w.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[i].abs().partial_cmp(&w[j].abs()).expect("finite coefficients"));
    let amplitudes: Vec<f64> = order.iter().map(|&i| w[i].abs()).collect();
    let keep_cost: Vec<f64> = order.iter().map(|&i| (w[i] - x[i]) * (w[i] - x[i])).collect();
    let signed_clean: Vec<f64> = order.iter().map(|&i| w[i].signum() * x[i]).collect();
    let clean_sq: Vec<f64> = order.iter().map(|&i| x[i] * x[i]).collect();

    // suffix sums over the clipped set, prefix sum over the kept set
    let mut suffix_signed = vec![0.0; n + 1];
    let mut suffix_clean_sq = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix_signed[i] = suffix_signed[i + 1] + signed_clean[i];
        suffix_clean_sq[i] = suffix_clean_sq[i + 1] + clean_sq[i];
    }

    let eval = |j: usize, theta: f64, kept_prefix: f64| -> f64 {
        let clipped = (n - j) as f64;
        kept_prefix + clipped * theta * theta - 2.0 * theta * suffix_signed[j]
            + suffix_clean_sq[j]
    };

    let mut best_theta = f64::NAN;
    let mut best_obj = f64::INFINITY;
    let mut kept_prefix = 0.0;
    let mut j = 0;
    loop {
        // segment where exactly j coefficients satisfy |w| <= theta:
        // theta in [lo, hi), empty when lo == hi
        let lo = if j == 0 { 0.0 } else { amplitudes[j - 1] };
        let hi = if j == n { f64::INFINITY } else { amplitudes[j] };
        let segment_valid = j == n || lo < hi || (j > 0 && lo == amplitudes[j - 1] && lo < hi);
        if segment_valid && lo <= hi {
            let mut candidates = [lo, lo];
            if n > j {
                let vertex = suffix_signed[j] / (n - j) as f64;
                candidates[1] = vertex.clamp(lo, if hi.is_finite() { hi } else { lo });
            }
            for &theta in &candidates {
                let obj = eval(j, theta, kept_prefix);
                if obj < best_obj {
                    best_obj = obj;
                    best_theta = theta;
                }
            }
        }
        if j == n {
            break;
        }
        // advance across the tie group at amplitudes[j]
        let mut k = j;
        while k < n && amplitudes[k] == amplitudes[j] {
            kept_prefix += keep_cost[k];
            k += 1;
        }
        j = k;
    }
    best_theta
}

/// `sigma[m] * sqrt(2 ln n)` per scale, applied with the soft (clipping)
/// operator. `n` is the reference sample count, conventionally the signal
/// length in the time domain.
pub fn universal_thresholds(sigma: &[f64], n: usize) -> Result<ThresholdSpec> {
    if n < 2 {
        return Err(invalid_input!("universal threshold needs n >= 2, got {n}"));
    }
    if sigma.is_empty() {
        return Err(invalid_input!("universal threshold needs at least one scale"));
    }
    let factor = (2.0 * (n as f64).ln()).sqrt();
    let per_scale = sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if !s.is_finite() || s < 0.0 {
                Err(invalid_input!("sigma for scale {} is invalid: {s}", i + 1))
            } else {
                Ok(s * factor)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ThresholdSpec { method: ThresholdMethod::Soft, per_scale })
}

/// Stein unbiased risk estimate for the clipping operator
/// `sign(w) * min(|w|, theta)` when `w` equals its estimation target plus
/// i.i.d. Gaussian noise of standard deviation `sigma`:
///
/// ```text
/// -N sigma^2 + sum_i max(|w_i| - theta, 0)^2 + 2 sigma^2 #{i : |w_i| < theta}
/// ```
///
/// Averaged over noise draws this matches the operator's true mean squared
/// error against the target.
pub fn sure_clip_risk(coeffs: &[f64], sigma: f64, theta: f64) -> f64 {
    let n = coeffs.len() as f64;
    let var = sigma * sigma;
    let mut shrink = 0.0;
    let mut kept = 0usize;
    for &w in coeffs {
        let a = w.abs();
        if a > theta {
            let d = a - theta;
            shrink += d * d;
        }
        if a < theta {
            kept += 1;
        }
    }
    -n * var + shrink + 2.0 * var * kept as f64
}

/// Risk objective minimized when selecting a clipping threshold from data
/// that mixes a Gaussian background (std `sigma`) with large outliers:
///
/// ```text
/// N sigma^2 + sum_i min(|w_i|, theta)^2 - 2 sigma^2 #{i : |w_i| <= theta}
/// ```
///
/// This is the Stein estimate of the squared distance between the clipped
/// coefficients and the Gaussian component; minimizing it keeps the
/// background while flattening outliers.
pub fn sure_selection_objective(coeffs: &[f64], sigma: f64, theta: f64) -> f64 {
    let n = coeffs.len() as f64;
    let var = sigma * sigma;
    let mut clipped_energy = 0.0;
    let mut within = 0usize;
    for &w in coeffs {
        let a = w.abs().min(theta);
        clipped_energy += a * a;
        if w.abs() <= theta {
            within += 1;
        }
    }
    n * var + clipped_energy - 2.0 * var * within as f64
}

/// Threshold for one coefficient array via the hybrid rule: when the
/// centered second moment shows no energy above the noise floor
/// (`s^2 <= (log2 N)^{3/2} / sqrt(N)`), falls back to the per-scale
/// universal threshold; otherwise minimizes [`sure_selection_objective`]
/// exactly over its breakpoints.
pub fn sure_threshold_scale(coeffs: &[f64], sigma: f64) -> Result<f64> {
    if coeffs.is_empty() {
        return Err(invalid_input!("cannot select a threshold for an empty scale"));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(invalid_input!("sigma must be positive and finite, got {sigma}"));
    }
    let n = coeffs.len();
    let nf = n as f64;
    let var = sigma * sigma;
    let s2 = coeffs.iter().map(|w| w * w / var - 1.0).sum::<f64>() / nf;
    let eta = nf.log2().powf(1.5) / nf.sqrt();
    if s2 <= eta {
        return Ok(sigma * (2.0 * nf.ln()).sqrt());
    }

    // the objective grows with theta inside each segment between sorted
    // amplitudes, so segment left endpoints {0} and the amplitudes
    // themselves cover the global minimum
    let mut amplitudes: Vec<f64> = coeffs.iter().map(|w| w.abs()).collect();
    amplitudes.sort_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let mut best_theta = 0.0;
    let mut best_obj = sure_selection_objective(coeffs, sigma, 0.0);
    let mut clipped_energy_prefix = 0.0;
    let mut j = 0;
    while j < n {
        let theta = amplitudes[j];
        let mut k = j;
        while k < n && amplitudes[k] == theta {
            clipped_energy_prefix += theta * theta;
            k += 1;
        }
        // obj(theta) with all |w| <= theta kept exactly
        let obj = nf * var
            + clipped_energy_prefix
            + (n - k) as f64 * theta * theta
            - 2.0 * var * k as f64;
        if obj < best_obj {
            best_obj = obj;
            best_theta = theta;
        }
        j = k;
    }
    Ok(best_theta)
}

/// Per-scale thresholds from [`sure_threshold_scale`], applied with the
/// soft (clipping) operator. `sigma[i]` is the Gaussian background scale for
/// scale `i + 1`.
pub fn sure_thresholds(
    artifacted: &WaveletDecomposition,
    sigma: &[f64],
) -> Result<ThresholdSpec> {
    if sigma.len() != artifacted.scale_count() {
        return Err(invalid_input!(
            "got {} sigma values for {} scales",
            sigma.len(),
            artifacted.scale_count()
        ));
    }
    let mut per_scale = Vec::with_capacity(sigma.len());
    for m in 1..=artifacted.scale_count() {
        per_scale.push(sure_threshold_scale(artifacted.scale(m)?, sigma[m - 1])?);
    }
    Ok(ThresholdSpec { method: ThresholdMethod::Soft, per_scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{decompose, reconstruct, Boundary, WaveletSpec};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
    }

    #[test]
    fn hard_keeps_small_and_zeroes_large() {
        assert_eq!(apply_hard(1.5, 2.0), 1.5);
        assert_eq!(apply_hard(-1.5, 2.0), -1.5);
        assert_eq!(apply_hard(2.5, 2.0), 0.0);
        assert_eq!(apply_hard(-2.5, 2.0), 0.0);
        // exactly at the threshold: zeroed
        assert_eq!(apply_hard(2.0, 2.0), 0.0);
        assert_eq!(apply_hard(0.0, 0.0), 0.0);
    }

    #[test]
    fn soft_clips_amplitude_and_keeps_sign() {
        assert_eq!(apply_soft(1.5, 2.0), 1.5);
        assert_eq!(apply_soft(2.5, 2.0), 2.0);
        assert_eq!(apply_soft(-2.5, 2.0), -2.0);
        assert_eq!(apply_soft(2.0, 2.0), 2.0);
        assert_eq!(apply_soft(-0.0, 2.0), -0.0);
    }

    #[test]
    fn operators_never_increase_amplitude() {
        for i in -50..50 {
            let w = i as f64 * 0.173;
            for t in [0.0, 0.5, 1.0, 5.0] {
                assert!(apply_hard(w, t).abs() <= w.abs());
                assert!(apply_soft(w, t).abs() <= w.abs());
                assert!(apply_soft(w, t).abs() <= t);
            }
        }
    }

    #[test]
    fn apply_thresholds_validates_shape_and_values() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let dec = decompose(&noise(256, 1), &w, 3, Boundary::Symmetric).unwrap();
        let bad_len = ThresholdSpec { method: ThresholdMethod::Soft, per_scale: vec![1.0; 3] };
        assert!(apply_thresholds(&dec, &bad_len).is_err());
        let bad_value = ThresholdSpec {
            method: ThresholdMethod::Soft,
            per_scale: vec![1.0, -1.0, 1.0, 1.0],
        };
        assert!(apply_thresholds(&dec, &bad_value).is_err());
        let ok = ThresholdSpec { method: ThresholdMethod::Soft, per_scale: vec![0.5; 4] };
        let out = apply_thresholds(&dec, &ok).unwrap();
        for m in 1..=4 {
            for &c in out.scale(m).unwrap() {
                assert!(c.abs() <= 0.5 + 1e-15);
            }
        }
    }

    #[test]
    fn infinite_thresholds_are_identity() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let x = noise(256, 2);
        let dec = decompose(&x, &w, 3, Boundary::Symmetric).unwrap();
        let spec = ThresholdSpec {
            method: ThresholdMethod::Soft,
            per_scale: vec![f64::INFINITY; 4],
        };
        let out = apply_thresholds(&dec, &spec).unwrap();
        let back = reconstruct(&out).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn without_approximation_makes_last_scale_pass_through() {
        let spec = ThresholdSpec { method: ThresholdMethod::Hard, per_scale: vec![1.0, 2.0, 3.0] };
        let exempt = spec.without_approximation();
        assert_eq!(exempt.per_scale[0], 1.0);
        assert_eq!(exempt.per_scale[1], 2.0);
        assert!(exempt.per_scale[2].is_infinite());
    }

    #[test]
    fn lowpass_baseline_keeps_only_the_approximation() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let dec = decompose(&noise(512, 3), &w, 4, Boundary::Symmetric).unwrap();
        let low = lowpass_baseline(&dec);
        for m in 1..=4 {
            assert!(low.scale(m).unwrap().iter().all(|&c| c == 0.0));
        }
        assert_eq!(low.scale(5).unwrap(), dec.scale(5).unwrap());
    }

    #[test]
    fn lowpass_variance_ratio_tracks_the_coefficient_share() {
        // white noise in an orthogonal decomposition: the approximation holds
        // (approx count / total) of the energy, so the reconstructed variance
        // shrinks by about that factor
        let w = WaveletSpec::from_name("sym5").unwrap();
        let mut ratios = Vec::new();
        for seed in 0..20 {
            let x = noise(1024, 400 + seed);
            let dec = decompose(&x, &w, 5, Boundary::Periodic).unwrap();
            let back = reconstruct(&lowpass_baseline(&dec)).unwrap();
            let var_in = crate::stats::population_variance(&x);
            let var_out = crate::stats::population_variance(&back);
            ratios.push(var_out / var_in);
        }
        let mean_ratio = crate::stats::mean(&ratios);
        let expected = 32.0 / 1024.0;
        assert!(
            (mean_ratio - expected).abs() < expected * 0.5,
            "variance ratio {mean_ratio}, expected about {expected}"
        );
    }

    // exhaustive check helper: apply a threshold directly and measure the
    // squared distance to the clean coefficients
    fn direct_objective(w: &[f64], x: &[f64], theta: f64, method: ThresholdMethod) -> f64 {
        w.iter()
            .zip(x)
            .map(|(&wi, &xi)| {
                let r = apply_one(method, wi, theta);
                (r - xi) * (r - xi)
            })
            .sum()
    }

    fn assert_no_better_candidate(
        w: &[f64],
        x: &[f64],
        method: ThresholdMethod,
        chosen: f64,
        label: &str,
    ) {
        let chosen_obj = direct_objective(w, x, chosen, method);
        let max_amp = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut candidates: Vec<f64> = Vec::new();
        for i in 0..=2000 {
            candidates.push(max_amp * 1.1 * i as f64 / 2000.0);
        }
        for &wi in w {
            let a = wi.abs();
            candidates.push(a);
            candidates.push(a.next_up());
            candidates.push((a - 1e-9).max(0.0));
        }
        for &theta in &candidates {
            let obj = direct_objective(w, x, theta, method);
            assert!(
                chosen_obj <= obj + 1e-9,
                "{label}: candidate {theta} beats chosen {chosen} ({obj} < {chosen_obj})"
            );
        }
    }

    #[test]
    fn ideal_thresholds_beat_every_grid_and_breakpoint_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..12 {
            let n = 40 + trial * 13;
            let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let w: Vec<f64> = x
                .iter()
                .map(|&xi| {
                    // sparse large outliers on top of the clean value
                    if rng.gen::<f64>() < 0.15 {
                        xi + 12.0 * if rng.gen::<bool>() { 1.0 } else { -1.0 }
                    } else {
                        xi
                    }
                })
                .collect();
            for method in [ThresholdMethod::Hard, ThresholdMethod::Soft] {
                let theta = match method {
                    ThresholdMethod::Hard => ideal_hard_scale(&w, &x),
                    ThresholdMethod::Soft => ideal_soft_scale(&w, &x),
                };
                assert!(theta.is_finite() && theta >= 0.0);
                assert_no_better_candidate(&w, &x, method, theta, "mixed outliers");
            }
        }
    }

    #[test]
    fn ideal_soft_on_identical_inputs_is_identity_threshold() {
        // distinct amplitudes, clean == artifacted: any clipping hurts, so the
        // optimum keeps everything; the maximum amplitude achieves it
        let x = vec![0.5, -1.5, 2.5, -3.5];
        let theta = ideal_soft_scale(&x, &x);
        assert_eq!(theta, 3.5);
        assert_eq!(direct_objective(&x, &x, theta, ThresholdMethod::Soft), 0.0);
    }

    #[test]
    fn ideal_hard_with_zero_clean_prefers_zero_threshold() {
        let x = vec![0.0; 5];
        let w = vec![3.0, -1.0, 0.5, 2.0, -4.0];
        let theta = ideal_hard_scale(&w, &x);
        assert_eq!(theta, 0.0);
        assert_eq!(direct_objective(&w, &x, theta, ThresholdMethod::Hard), 0.0);
    }

    #[test]
    fn ideal_thresholds_validates_matching_shapes() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let a = decompose(&noise(256, 5), &w, 3, Boundary::Symmetric).unwrap();
        let b = decompose(&noise(256, 6), &w, 2, Boundary::Symmetric).unwrap();
        let oracle = OracleContext { clean: &b };
        assert!(ideal_thresholds(&a, &oracle, ThresholdMethod::Soft).is_err());
    }

    #[test]
    fn universal_threshold_matches_the_closed_form() {
        let spec = universal_thresholds(&[1.0, 2.0], 1024).unwrap();
        let factor = (2.0 * 1024f64.ln()).sqrt();
        assert!((factor - 3.723297).abs() < 1e-6);
        assert!((spec.per_scale[0] - factor).abs() < 1e-12);
        assert!((spec.per_scale[1] - 2.0 * factor).abs() < 1e-12);
        assert_eq!(spec.method, ThresholdMethod::Soft);
        assert!(universal_thresholds(&[1.0], 1).is_err());
        assert!(universal_thresholds(&[], 100).is_err());
        assert!(universal_thresholds(&[-1.0], 100).is_err());
    }

    #[test]
    fn sure_formulas_match_hand_computed_values() {
        let coeffs = [1.0, -2.0, 3.0];
        // selection objective at theta=2:
        // 3*1 + (1 + 4 + 4) - 2*1*2 = 8
        assert!((sure_selection_objective(&coeffs, 1.0, 2.0) - 8.0).abs() < 1e-12);
        // clip-risk estimate at theta=2:
        // -3*1 + (3-2)^2 + 2*1*#{|w|<2} = -3 + 1 + 2 = 0
        assert!((sure_clip_risk(&coeffs, 1.0, 2.0) - 0.0).abs() < 1e-12);
        // theta=0 zeroes nothing under clip... everything clips to 0:
        // selection: 3 + 0 - 0 = 3; clip risk: -3 + (1+4+9) + 0 = 11
        assert!((sure_selection_objective(&coeffs, 1.0, 0.0) - 3.0).abs() < 1e-12);
        assert!((sure_clip_risk(&coeffs, 1.0, 0.0) - 11.0).abs() < 1e-12);
    }

    #[test]
    fn sure_scale_on_pure_gaussian_keeps_nearly_everything() {
        for seed in 0..5 {
            let w = noise(1024, 900 + seed);
            let theta = sure_threshold_scale(&w, 1.0).unwrap();
            let q99 = crate::stats::quantile(
                &w.iter().map(|v| v.abs()).collect::<Vec<f64>>(),
                0.99,
            );
            assert!(
                theta >= q99,
                "seed {seed}: theta {theta} clips into the Gaussian bulk (q99 {q99})"
            );
            let clipped = w.iter().filter(|v| v.abs() > theta).count();
            assert!(clipped * 100 <= w.len(), "seed {seed}: clipped {clipped} of {}", w.len());
        }
    }

    #[test]
    fn sure_scale_with_outliers_clips_them_and_minimizes_the_objective_exactly() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(950 + seed);
            let mut w: Vec<f64> = (0..1024)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            for i in 0..51 {
                w[i * 20] += 20.0 * if i % 2 == 0 { 1.0 } else { -1.0 };
            }
            let theta = sure_threshold_scale(&w, 1.0).unwrap();
            // far below the artifact amplitude, above degenerate zero
            assert!(
                theta > 0.5 && theta < 5.0,
                "seed {seed}: theta {theta} not a bulk-scale threshold"
            );
            // exact minimizer: no amplitude breakpoint or grid point beats it
            let chosen = sure_selection_objective(&w, 1.0, theta);
            let mut candidates: Vec<f64> = w.iter().map(|v| v.abs()).collect();
            candidates.extend((0..=400).map(|i| i as f64 * 0.06));
            for t in candidates {
                let obj = sure_selection_objective(&w, 1.0, t);
                assert!(
                    chosen <= obj + 1e-9,
                    "seed {seed}: candidate {t} beats selected {theta} ({obj} < {chosen})"
                );
            }
        }
    }

    #[test]
    fn sure_scale_handles_single_coefficient_arrays() {
        // below the noise floor: sparse branch, universal with n=1 gives 0
        assert_eq!(sure_threshold_scale(&[0.5], 1.0).unwrap(), 0.0);
        // loud single coefficient: minimizer picks 0 (clipping it to zero
        // costs w^2 - sigma^2 more than keeping... evaluate: keep = w^2 - s^2, zero at theta=0 = s^2)
        let theta = sure_threshold_scale(&[5.0], 1.0).unwrap();
        assert_eq!(theta, 0.0);
        // moderately loud: keeping wins
        let theta = sure_threshold_scale(&[1.3], 1.0).unwrap();
        assert_eq!(theta, 1.3);
    }

    #[test]
    fn sure_thresholds_requires_matching_sigma_count() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let dec = decompose(&noise(256, 8), &w, 3, Boundary::Symmetric).unwrap();
        assert!(sure_thresholds(&dec, &[1.0, 1.0]).is_err());
        assert!(sure_thresholds(&dec, &[1.0, 1.0, 1.0, 0.0]).is_err());
        let spec = sure_thresholds(&dec, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(spec.per_scale.len(), 4);
    }

    #[test]
    fn scale_sigma_estimators_track_white_noise_level() {
        let w = WaveletSpec::from_name("sym5").unwrap();
        let x: Vec<f64> = noise(4096, 9).iter().map(|v| v * 2.0).collect();
        let dec = decompose(&x, &w, 3, Boundary::Periodic).unwrap();
        // orthogonal transform of white noise keeps sigma at every scale
        for (m, (s, mad)) in scale_std(&dec).iter().zip(scale_mad_sigma(&dec)).enumerate() {
            if m + 2 == dec.scale_count() + 1 {
                continue; // approximation mean is not zero-ish for noise, skip strictness
            }
            assert!((s - 2.0).abs() < 0.25, "scale {}: std {s}", m + 1);
            assert!((mad - 2.0).abs() < 0.35, "scale {}: mad sigma {mad}", m + 1);
        }
    }
}
