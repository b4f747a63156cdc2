//! PAPR and its CCDF, EVM, and averaged-periodogram PSD.

use std::f64::consts::TAU;

use crate::numerics::{energy, fft_in_place, SimRng};
use crate::waveform::{random_frame, Grid, PilotPattern, WaveformConfig};
use crate::{Error, Result, C64};

/// EVM values are clamped here instead of reporting `-∞` for identical grids.
pub const EVM_FLOOR_DB: f64 = -150.0;

/// Band-limited interpolation by zero padding the middle of the spectrum.
/// The Nyquist bin of an even-length input is split between both edges so
/// that the original samples are reproduced exactly.
pub fn oversample(x: &[C64], factor: usize) -> Vec<C64> {
    let len = x.len();
    if factor <= 1 || len == 0 {
        return x.to_vec();
    }
    let mut spec = x.to_vec();
    fft_in_place(&mut spec, false);
    let out_len = len * factor;
    let mut padded = vec![C64::default(); out_len];
    let half = len / 2;
    if len.is_multiple_of(2) {
        padded[..half].copy_from_slice(&spec[..half]);
        padded[out_len - half + 1..].copy_from_slice(&spec[half + 1..]);
        padded[half] = spec[half] * 0.5;
        padded[out_len - half] = spec[half] * 0.5;
    } else {
        padded[..=half].copy_from_slice(&spec[..=half]);
        padded[out_len - half..].copy_from_slice(&spec[half + 1..]);
    }
    fft_in_place(&mut padded, true);
    // restore the amplitude scale of the input samples
    let scale = (factor as f64).sqrt();
    for z in &mut padded {
        *z *= scale;
    }
    padded
}

/// `10·log10(max|x̃|² / mean|x̃|²)` of the `oversample`-times interpolated
/// signal.
pub fn papr_db(x: &[C64], oversample_factor: usize) -> Result<f64> {
    if oversample_factor == 0 {
        return Err(Error::param("oversampling factor must be at least 1"));
    }
    let e = energy(x);
    if x.is_empty() || e == 0.0 {
        return Err(Error::precondition("PAPR of a zero-energy buffer is undefined"));
    }
    let y = oversample(x, oversample_factor);
    let peak = y.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mean = energy(&y) / y.len() as f64;
    Ok(10.0 * (peak / mean).log10())
}

/// PAPR of one random frame, measured on the CP-stripped samples.
pub fn frame_papr(cfg: &WaveformConfig, oversample_factor: usize, rng: &mut SimRng) -> Result<f64> {
    let frame = random_frame(cfg, &PilotPattern::none(cfg), rng)?;
    papr_db(&frame.cp_stripped(), oversample_factor)
}

pub const CCDF_AXIS_POINTS: usize = 141;
pub const CCDF_AXIS_STEP_DB: f64 = 0.1;

/// The fixed 0 to 14 dB PAPR axis in 0.1 dB steps.
pub fn ccdf_axis() -> Vec<f64> {
    (0..CCDF_AXIS_POINTS).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub papr_axis: Vec<f64>,
    /// `P(PAPR > γ)` at each axis point.
    pub probability: Vec<f64>,
    pub frames: usize,
    /// Per-frame PAPR values, ascending.
    pub samples_db: Vec<f64>,
}

impl CcdfCurve {
    pub fn from_samples(mut samples_db: Vec<f64>) -> Result<Self> {
        if samples_db.is_empty() {
            return Err(Error::precondition("CCDF needs at least one frame"));
        }
        if samples_db.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite("NaN PAPR sample".into()));
        }
        samples_db.sort_by(f64::total_cmp);
        let n = samples_db.len();
        let papr_axis = ccdf_axis();
        let probability = papr_axis
            .iter()
            .map(|&g| {
                let at_or_below = samples_db.partition_point(|&v| v <= g);
                (n - at_or_below) as f64 / n as f64
            })
            .collect();
        Ok(Self {
            papr_axis,
            probability,
            frames: n,
            samples_db,
        })
    }

    /// Smallest observed PAPR exceeded by at most a fraction `prob` of
    /// frames.
    pub fn papr_at(&self, prob: f64) -> f64 {
        let n = self.samples_db.len();
        let idx = ((n as f64 * (1.0 - prob)).ceil() as usize).clamp(1, n) - 1;
        self.samples_db[idx]
    }
}

/// CCDF of per-frame PAPR over `frames` random frames drawn from `rng`.
pub fn ccdf(cfg: &WaveformConfig, frames: usize, oversample_factor: usize, rng: &mut SimRng) -> Result<CcdfCurve> {
    let samples = (0..frames)
        .map(|_| frame_papr(cfg, oversample_factor, rng))
        .collect::<Result<Vec<_>>>()?;
    CcdfCurve::from_samples(samples)
}

/// `10·log10(Σ|meas − ref|² / Σ|ref|²)`, clamped at [`EVM_FLOOR_DB`].
pub fn evm_db(reference: &Grid, measured: &Grid) -> Result<f64> {
    if !reference.same_shape(measured) {
        return Err(Error::Dimension {
            expected_rows: reference.rows(),
            expected_cols: reference.cols(),
            rows: measured.rows(),
            cols: measured.cols(),
        });
    }
    let err: f64 = reference
        .as_slice()
        .iter()
        .zip(measured.as_slice())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let e = reference.energy();
    if e == 0.0 {
        return Err(Error::precondition("EVM reference has zero energy"));
    }
    if err == 0.0 {
        return Ok(EVM_FLOOR_DB);
    }
    Ok((10.0 * (err / e).log10()).max(EVM_FLOOR_DB))
}

/// Averaged periodogram (Bartlett, non-overlapping segments) with a periodic
/// Hann window, normalized so white noise of variance `σ²` reads `σ²` in
/// every bin. The buffer is cut into `segments` pieces of `len / segments`
/// samples; leftovers are dropped. Bins come back in ascending frequency
/// order, from `-fs/2` up to just below `+fs/2`.
pub fn psd(x: &[C64], segments: usize) -> Result<Vec<f64>> {
    if segments == 0 {
        return Err(Error::param("PSD needs at least one segment"));
    }
    let seg_len = x.len() / segments;
    if seg_len < 2 {
        return Err(Error::Sizing(format!(
            "{} samples cannot form {segments} segments of at least 2 samples",
            x.len()
        )));
    }
    let window: Vec<f64> = (0..seg_len)
        .map(|k| 0.5 - 0.5 * (TAU * k as f64 / seg_len as f64).cos())
        .collect();
    let win_power = window.iter().map(|w| w * w).sum::<f64>() / seg_len as f64;
    let mut acc = vec![0.0; seg_len];
    let mut buf = vec![C64::default(); seg_len];
    for seg in x.chunks_exact(seg_len).take(segments) {
        for ((b, s), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = s * w;
        }
        fft_in_place(&mut buf, false);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let norm = 1.0 / (segments as f64 * win_power);
    let half = seg_len / 2;
    Ok((0..seg_len).map(|i| acc[(i + seg_len - half) % seg_len] * norm).collect())
}
