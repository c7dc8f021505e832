//! Multilevel discrete wavelet transform with selectable boundary handling.
//!
//! Analysis convolves with the decomposition pair and keeps outputs at odd
//! phases (`out[k]` gathers input index `2k + 1 - j`), which matches the
//! widespread convention used by numeric packages, so coefficient arrays are
//! interchangeable with those tools at equal settings.
//!
//! Two boundary modes are provided:
//!
//! * [`Boundary::Symmetric`]: half-point reflection. Level lengths follow
//!   `ceil((n + filter_len - 1) / 2)`; the transform is redundant at the
//!   edges but reconstruction is exact.
//! * [`Boundary::Periodic`]: circular wrap (odd lengths are padded by
//!   repeating the final sample). Level lengths follow `ceil(n / 2)` and the
//!   transform is orthogonal for even lengths, so coefficient energy equals
//!   signal energy.

mod filters;

pub use filters::Family;

use crate::error::{invalid_input, Result};
use crate::stats;

/// Default cap on the decomposition depth picked by [`default_levels`].
pub const DEFAULT_LEVEL_CAP: usize = 5;

/// Boundary handling for analysis and synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Symmetric,
    Periodic,
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::Symmetric => "symmetric",
            Boundary::Periodic => "periodic",
        }
    }

    /// Parses `symmetric` or `periodic`.
    pub fn parse(name: &str) -> Result<Boundary> {
        match name {
            "symmetric" => Ok(Boundary::Symmetric),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(invalid_input!(
                "unknown boundary mode '{other}' (expected symmetric or periodic)"
            )),
        }
    }
}

/// A wavelet with its four derived analysis/synthesis filters.
#[derive(Debug, Clone)]
pub struct WaveletSpec {
    family: Family,
    rec_lo: Vec<f64>,
    rec_hi: Vec<f64>,
    dec_lo: Vec<f64>,
    dec_hi: Vec<f64>,
}

impl WaveletSpec {
    pub fn new(family: Family) -> WaveletSpec {
        let rec_lo: Vec<f64> = family.scaling_taps().to_vec();
        let f = rec_lo.len();
        let dec_lo: Vec<f64> = (0..f).map(|k| rec_lo[f - 1 - k]).collect();
        let rec_hi: Vec<f64> = (0..f)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * rec_lo[f - 1 - k]
            })
            .collect();
        let dec_hi: Vec<f64> = (0..f).map(|k| rec_hi[f - 1 - k]).collect();
        WaveletSpec { family, rec_lo, rec_hi, dec_lo, dec_hi }
    }

    /// Builds from a name such as `db4` or `sym5`.
    pub fn from_name(name: &str) -> Result<WaveletSpec> {
        Ok(WaveletSpec::new(Family::parse(name)?))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> String {
        self.family.name()
    }

    pub fn filter_len(&self) -> usize {
        self.rec_lo.len()
    }

    pub fn rec_lo(&self) -> &[f64] {
        &self.rec_lo
    }

    pub fn rec_hi(&self) -> &[f64] {
        &self.rec_hi
    }

    pub fn dec_lo(&self) -> &[f64] {
        &self.dec_lo
    }

    pub fn dec_hi(&self) -> &[f64] {
        &self.dec_hi
    }

    /// Largest absolute residual over the filter-bank identities:
    /// low-pass sum, unit energy, vanishing even-shift autocorrelation,
    /// and low/high cross-orthogonality at every even shift.
    pub fn orthogonality_defect(&self) -> f64 {
        let f = self.filter_len();
        let mut worst = (self.dec_lo.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs();
        for shift in 0..f / 2 {
            let span = f - 2 * shift;
            let mut lo_lo = 0.0;
            let mut hi_hi = 0.0;
            let mut lo_hi = 0.0;
            for i in 0..span {
                lo_lo += self.dec_lo[i] * self.dec_lo[i + 2 * shift];
                hi_hi += self.dec_hi[i] * self.dec_hi[i + 2 * shift];
                lo_hi += self.dec_lo[i] * self.dec_hi[i + 2 * shift];
            }
            let expected = if shift == 0 { 1.0 } else { 0.0 };
            worst = worst
                .max((lo_lo - expected).abs())
                .max((hi_hi - expected).abs())
                .max(lo_hi.abs());
        }
        worst
    }
}

/// Output of [`decompose`]: detail arrays (finest first) plus the final
/// approximation, with everything needed to invert the transform.
#[derive(Debug, Clone)]
pub struct WaveletDecomposition {
    wavelet: WaveletSpec,
    boundary: Boundary,
    original_length: usize,
    details: Vec<Vec<f64>>,
    approximation: Vec<f64>,
}

impl WaveletDecomposition {
    /// Number of detail levels.
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Number of coefficient arrays: detail levels plus the approximation.
    pub fn scale_count(&self) -> usize {
        self.details.len() + 1
    }

    /// Detail arrays, index 0 = finest level.
    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    pub fn approximation(&self) -> &[f64] {
        &self.approximation
    }

    pub fn wavelet(&self) -> &WaveletSpec {
        &self.wavelet
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    /// Coefficient array for scale `m`: `1..=levels()` are details from
    /// finest to coarsest, `levels() + 1` is the approximation.
    pub fn scale(&self, m: usize) -> Result<&[f64]> {
        if m >= 1 && m <= self.details.len() {
            Ok(&self.details[m - 1])
        } else if m == self.details.len() + 1 {
            Ok(&self.approximation)
        } else {
            Err(invalid_input!(
                "scale {m} out of range 1..={}",
                self.details.len() + 1
            ))
        }
    }

    /// Sum of squares over every stored coefficient.
    pub fn total_energy(&self) -> f64 {
        let detail_energy: f64 = self
            .details
            .iter()
            .map(|d| d.iter().map(|c| c * c).sum::<f64>())
            .sum();
        detail_energy + self.approximation.iter().map(|c| c * c).sum::<f64>()
    }

    /// Builds a new decomposition by transforming each coefficient array.
    /// The closure receives the scale index (same convention as [`Self::scale`])
    /// and must return an array of unchanged length.
    pub fn map_scales<F>(&self, mut transform: F) -> Result<WaveletDecomposition>
    where
        F: FnMut(usize, &[f64]) -> Vec<f64>,
    {
        let mut details = Vec::with_capacity(self.details.len());
        for (i, d) in self.details.iter().enumerate() {
            let mapped = transform(i + 1, d);
            if mapped.len() != d.len() {
                return Err(invalid_input!(
                    "scale {}: mapped length {} != original {}",
                    i + 1,
                    mapped.len(),
                    d.len()
                ));
            }
            details.push(mapped);
        }
        let m = self.details.len() + 1;
        let approximation = transform(m, &self.approximation);
        if approximation.len() != self.approximation.len() {
            return Err(invalid_input!(
                "scale {m}: mapped length {} != original {}",
                approximation.len(),
                self.approximation.len()
            ));
        }
        Ok(WaveletDecomposition {
            wavelet: self.wavelet.clone(),
            boundary: self.boundary,
            original_length: self.original_length,
            details,
            approximation,
        })
    }
}

fn analysis_output_len(input_len: usize, filter_len: usize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Symmetric => (input_len + filter_len - 1) / 2,
        Boundary::Periodic => input_len.div_ceil(2),
    }
}

/// Analysis input length at each level: index 0 is the signal length, index
/// `i` is the length entering level `i + 1`. Errors if any stage is shorter
/// than the filter.
fn analysis_input_lengths(
    signal_len: usize,
    filter_len: usize,
    levels: usize,
    boundary: Boundary,
) -> Result<Vec<usize>> {
    let mut lens = Vec::with_capacity(levels + 1);
    let mut current = signal_len;
    lens.push(current);
    for level in 1..=levels {
        if current < filter_len {
            return Err(invalid_input!(
                "cannot analyze level {level}: length {current} shorter than filter ({filter_len} taps)"
            ));
        }
        current = analysis_output_len(current, filter_len, boundary);
        lens.push(current);
    }
    Ok(lens)
}

/// Deepest decomposition whose coarsest array still has at least
/// `filter_len` coefficients, capped at [`DEFAULT_LEVEL_CAP`].
/// Returns 0 when even one level is infeasible.
pub fn default_levels(signal_len: usize, wavelet: &WaveletSpec, boundary: Boundary) -> usize {
    let f = wavelet.filter_len();
    let mut current = signal_len;
    let mut levels = 0;
    while levels < DEFAULT_LEVEL_CAP && current >= f {
        let next = analysis_output_len(current, f, boundary);
        if next < f {
            break;
        }
        current = next;
        levels += 1;
    }
    levels
}

fn symmetric_sample(x: &[f64], idx: isize) -> f64 {
    let n = x.len() as isize;
    let j = if idx < 0 {
        -idx - 1
    } else if idx >= n {
        2 * n - 1 - idx
    } else {
        idx
    };
    debug_assert!(j >= 0 && j < n, "reflection index out of range");
    x[j as usize]
}

fn analyze_symmetric(x: &[f64], dec_lo: &[f64], dec_hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let f = dec_lo.len();
    let out_len = (x.len() + f - 1) / 2;
    let mut approx = vec![0.0; out_len];
    let mut detail = vec![0.0; out_len];
    for k in 0..out_len {
        let base = 2 * k as isize + 1;
        let mut sa = 0.0;
        let mut sd = 0.0;
        for (j, (&lo, &hi)) in dec_lo.iter().zip(dec_hi).enumerate() {
            let v = symmetric_sample(x, base - j as isize);
            sa += lo * v;
            sd += hi * v;
        }
        approx[k] = sa;
        detail[k] = sd;
    }
    (approx, detail)
}

fn analyze_periodic(x: &[f64], dec_lo: &[f64], dec_hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut padded;
    let x = if x.len() % 2 == 0 {
        x
    } else {
        padded = x.to_vec();
        padded.push(*x.last().expect("analysis input is never empty"));
        &padded[..]
    };
    let m = x.len() as isize;
    let out_len = x.len() / 2;
    let mut approx = vec![0.0; out_len];
    let mut detail = vec![0.0; out_len];
    for k in 0..out_len {
        let base = 2 * k as isize + 1;
        let mut sa = 0.0;
        let mut sd = 0.0;
        for (j, (&lo, &hi)) in dec_lo.iter().zip(dec_hi).enumerate() {
            let v = x[(base - j as isize).rem_euclid(m) as usize];
            sa += lo * v;
            sd += hi * v;
        }
        approx[k] = sa;
        detail[k] = sd;
    }
    (approx, detail)
}

fn synthesize_symmetric(
    approx: &[f64],
    detail: &[f64],
    rec_lo: &[f64],
    rec_hi: &[f64],
    target_len: usize,
) -> Vec<f64> {
    let l = approx.len();
    let f = rec_lo.len();
    // full upsampled convolution, then drop the f-2 transition samples on
    // the left; the remainder starts at the first original sample
    let mut full = vec![0.0; 2 * l + f - 2];
    for k in 0..l {
        let (a, d) = (approx[k], detail[k]);
        for (j, (&lo, &hi)) in rec_lo.iter().zip(rec_hi).enumerate() {
            full[2 * k + j] += a * lo + d * hi;
        }
    }
    let valid = 2 * l + 2 - f;
    debug_assert!(valid >= target_len, "synthesis output shorter than target");
    full[f - 2..f - 2 + target_len].to_vec()
}

fn synthesize_periodic(
    approx: &[f64],
    detail: &[f64],
    dec_lo: &[f64],
    dec_hi: &[f64],
    target_len: usize,
) -> Vec<f64> {
    // adjoint of the analysis scatter; for an orthogonal bank this inverts it
    let l = approx.len();
    let m = (2 * l) as isize;
    let mut out = vec![0.0; 2 * l];
    for k in 0..l {
        let base = 2 * k as isize + 1;
        let (a, d) = (approx[k], detail[k]);
        for (j, (&lo, &hi)) in dec_lo.iter().zip(dec_hi).enumerate() {
            let idx = (base - j as isize).rem_euclid(m) as usize;
            out[idx] += a * lo + d * hi;
        }
    }
    out.truncate(target_len);
    out
}

/// Multilevel analysis of `samples`.
pub fn decompose(
    samples: &[f64],
    wavelet: &WaveletSpec,
    levels: usize,
    boundary: Boundary,
) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(invalid_input!("decomposition needs at least one level"));
    }
    if !stats::all_finite(samples) {
        return Err(invalid_input!("signal contains non-finite samples"));
    }
    // validates feasibility of every level up front
    analysis_input_lengths(samples.len(), wavelet.filter_len(), levels, boundary)?;

    let mut current = samples.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (approx, detail) = match boundary {
            Boundary::Symmetric => analyze_symmetric(&current, &wavelet.dec_lo, &wavelet.dec_hi),
            Boundary::Periodic => analyze_periodic(&current, &wavelet.dec_lo, &wavelet.dec_hi),
        };
        details.push(detail);
        current = approx;
    }
    Ok(WaveletDecomposition {
        wavelet: wavelet.clone(),
        boundary,
        original_length: samples.len(),
        details,
        approximation: current,
    })
}

/// Inverts [`decompose`], returning a signal of the recorded original length.
pub fn reconstruct(decomposition: &WaveletDecomposition) -> Result<Vec<f64>> {
    let levels = decomposition.levels();
    if levels == 0 {
        return Err(invalid_input!("decomposition has no detail levels"));
    }
    let wavelet = &decomposition.wavelet;
    let lens = analysis_input_lengths(
        decomposition.original_length,
        wavelet.filter_len(),
        levels,
        decomposition.boundary,
    )?;
    for (i, d) in decomposition.details.iter().enumerate() {
        if d.len() != lens[i + 1] {
            return Err(invalid_input!(
                "detail level {} has length {}, expected {}",
                i + 1,
                d.len(),
                lens[i + 1]
            ));
        }
    }
    if decomposition.approximation.len() != lens[levels] {
        return Err(invalid_input!(
            "approximation has length {}, expected {}",
            decomposition.approximation.len(),
            lens[levels]
        ));
    }

    let mut current = decomposition.approximation.clone();
    for m in (1..=levels).rev() {
        let detail = &decomposition.details[m - 1];
        let target = lens[m - 1];
        current = match decomposition.boundary {
            Boundary::Symmetric => {
                synthesize_symmetric(&current, detail, &wavelet.rec_lo, &wavelet.rec_hi, target)
            }
            Boundary::Periodic => {
                synthesize_periodic(&current, detail, &wavelet.dec_lo, &wavelet.dec_hi, target)
            }
        };
    }
    Ok(current)
}
