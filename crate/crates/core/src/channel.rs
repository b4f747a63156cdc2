//! Delay-Doppler multipath propagation, monostatic echo geometry and THz
//! transceiver impairments (Wiener phase noise, Rapp PA, AWGN).
//!
//! A path `(g, τ, ν)` acts on a frame as `y_k = g · x(k/fs − τ) · e^{j2πνk/fs}`.
//! The delay is applied as a phase ramp on the DFT of the whole frame, i.e.
//! band-limited periodic interpolation. That is exact for integer delays and
//! keeps fractional delays consistent with the cyclic extension of the frame,
//! which is what the per-symbol prefix relies on.

use std::f64::consts::TAU;

use crate::numerics::{fft_in_place, signed_bin, ComplexBuffer, SimRng};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub gain: C64,
    /// Seconds, non-negative.
    pub delay: f64,
    /// Hz.
    pub doppler: f64,
}

impl PathSpec {
    pub fn new(gain: C64, delay: f64, doppler: f64) -> Result<Self> {
        let p = Self { gain, delay, doppler };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self {
            gain: C64::new(1.0, 0.0),
            delay: 0.0,
            doppler: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(Error::param(format!("path delay {} s must be finite and >= 0", self.delay)));
        }
        if !self.doppler.is_finite() || !self.gain.re.is_finite() || !self.gain.im.is_finite() {
            return Err(Error::param("path gain and Doppler must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub paths: Vec<PathSpec>,
    /// Per-sample SNR after the channel; `None` leaves the output noiseless.
    pub snr_db: Option<f64>,
}

impl ChannelSpec {
    pub fn new(paths: Vec<PathSpec>, snr_db: Option<f64>) -> Result<Self> {
        let spec = Self { paths, snr_db };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::param("channel needs at least one path"));
        }
        for p in &self.paths {
            p.validate()?;
        }
        if let Some(s) = self.snr_db {
            if !s.is_finite() {
                return Err(Error::param("SNR must be finite"));
            }
        }
        Ok(())
    }

    pub fn max_delay(&self) -> f64 {
        self.paths.iter().map(|p| p.delay).fold(0.0, f64::max)
    }
}

/// Single point target seen by a co-located transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingScenario {
    pub range_m: f64,
    /// Radial velocity, positive when closing.
    pub velocity_mps: f64,
    pub rcs_gain: C64,
    /// Direct TX→RX leakage gain of a monostatic front end; off by default.
    pub self_interference: Option<C64>,
}

impl SensingScenario {
    pub fn new(range_m: f64, velocity_mps: f64) -> Result<Self> {
        if !(range_m > 0.0 && range_m.is_finite()) {
            return Err(Error::param(format!("target range {range_m} m must be positive")));
        }
        Ok(Self {
            range_m,
            velocity_mps,
            rcs_gain: C64::new(1.0, 0.0),
            self_interference: None,
        })
    }
}

/// Round-trip delay `2R/c` and Doppler `2v·f_c/c` of the echo.
pub fn scenario_to_paths(s: &SensingScenario, carrier_hz: f64) -> PathSpec {
    PathSpec {
        gain: s.rcs_gain,
        delay: 2.0 * s.range_m / SPEED_OF_LIGHT,
        doppler: 2.0 * s.velocity_mps * carrier_hz / SPEED_OF_LIGHT,
    }
}

/// Echo channel of a scenario, with the optional self-interference path.
pub fn echo_channel(s: &SensingScenario, carrier_hz: f64, snr_db: Option<f64>) -> ChannelSpec {
    let mut paths = vec![scenario_to_paths(s, carrier_hz)];
    if let Some(g) = s.self_interference {
        paths.push(PathSpec {
            gain: g,
            delay: 0.0,
            doppler: 0.0,
        });
    }
    ChannelSpec { paths, snr_db }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelWarning {
    /// The path reaches further back than the cyclic prefix protects, so the
    /// echo lies beyond the unambiguous sensing range and adds inter-symbol
    /// interference.
    DelayBeyondGuard {
        path: usize,
        delay_samples: f64,
        guard_samples: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub samples: ComplexBuffer,
    pub warnings: Vec<ChannelWarning>,
    /// Mean per-sample power of the noiseless channel output.
    pub signal_power: f64,
    /// Per-sample variance of the added noise (0 when noiseless).
    pub noise_variance: f64,
}

/// Noiseless multipath response of a whole frame.
pub fn propagate(x: &[C64], paths: &[PathSpec], sample_rate: f64) -> Vec<C64> {
    let len = x.len();
    let mut spectrum = x.to_vec();
    fft_in_place(&mut spectrum, false);
    let mut out = vec![C64::default(); len];
    let mut branch = vec![C64::default(); len];
    for p in paths {
        delay_ramp(&spectrum, &mut branch, p.delay * sample_rate, -1.0);
        fft_in_place(&mut branch, true);
        for (k, (o, b)) in out.iter_mut().zip(&branch).enumerate() {
            *o += p.gain * b * doppler_phasor(p.doppler, k, sample_rate);
        }
    }
    out
}

/// Adjoint of [`propagate`] for the same path list.
pub fn propagate_adjoint(y: &[C64], paths: &[PathSpec], sample_rate: f64) -> Vec<C64> {
    let len = y.len();
    let mut out = vec![C64::default(); len];
    let mut branch = vec![C64::default(); len];
    let mut shifted = vec![C64::default(); len];
    for p in paths {
        for (k, (s, v)) in shifted.iter_mut().zip(y).enumerate() {
            *s = v * doppler_phasor(p.doppler, k, sample_rate).conj();
        }
        fft_in_place(&mut shifted, false);
        delay_ramp(&shifted, &mut branch, p.delay * sample_rate, 1.0);
        fft_in_place(&mut branch, true);
        let g = p.gain.conj();
        for (o, b) in out.iter_mut().zip(&branch) {
            *o += g * b;
        }
    }
    out
}

fn delay_ramp(spectrum: &[C64], out: &mut [C64], delay_samples: f64, sign: f64) {
    let len = spectrum.len();
    for (q, (o, s)) in out.iter_mut().zip(spectrum).enumerate() {
        let f = signed_bin(q, len) / len as f64;
        *o = s * C64::from_polar(1.0, sign * TAU * f * delay_samples);
    }
}

#[inline]
fn doppler_phasor(doppler: f64, k: usize, sample_rate: f64) -> C64 {
    C64::from_polar(1.0, TAU * doppler * k as f64 / sample_rate)
}

/// Applies every path of `spec` to the frame and adds AWGN whose variance is
/// set from the measured power of the noiseless output.
///
/// Paths delayed past `cp_len` samples are still applied but reported in
/// [`ChannelOutput::warnings`].
pub fn apply_channel(
    x: &ComplexBuffer,
    spec: &ChannelSpec,
    sample_rate: f64,
    cp_len: usize,
    rng: &mut SimRng,
) -> Result<ChannelOutput> {
    spec.validate()?;
    if !(sample_rate > 0.0) {
        return Err(Error::param("sample rate must be positive"));
    }
    let warnings = spec
        .paths
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let d = p.delay * sample_rate;
            (d > cp_len as f64).then_some(ChannelWarning::DelayBeyondGuard {
                path: i,
                delay_samples: d,
                guard_samples: cp_len,
            })
        })
        .collect();
    let mut y = propagate(x, &spec.paths, sample_rate);
    let signal_power = crate::numerics::energy(&y) / y.len() as f64;
    let noise_variance = match spec.snr_db {
        Some(snr) => add_awgn(&mut y, signal_power, snr, rng),
        None => 0.0,
    };
    Ok(ChannelOutput {
        samples: ComplexBuffer::new(y)?,
        warnings,
        signal_power,
        noise_variance,
    })
}

/// Adds complex white Gaussian noise at `snr_db` below `signal_power`;
/// returns the noise variance used.
pub fn add_awgn(y: &mut [C64], signal_power: f64, snr_db: f64, rng: &mut SimRng) -> f64 {
    let var = signal_power / 10f64.powf(snr_db / 10.0);
    for z in y.iter_mut() {
        *z += rng.complex_gaussian(var);
    }
    var
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaModel {
    None,
    Rapp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpairmentSpec {
    /// Oscillator 3 dB linewidth at `pn_ref_carrier_hz`.
    pub pn_linewidth_ref_hz: f64,
    pub pn_ref_carrier_hz: f64,
    pub pa_model: PaModel,
    /// Rapp smoothness `p`.
    pub pa_smoothness: f64,
    /// Input backoff of the signal RMS below PA saturation, dB.
    pub pa_ibo_db: f64,
}

impl Default for ImpairmentSpec {
    /// 100 kHz linewidth at 300 GHz, PA disabled (Rapp `p = 2`, 6 dB IBO when
    /// switched on).
    fn default() -> Self {
        Self {
            pn_linewidth_ref_hz: 100e3,
            pn_ref_carrier_hz: 300e9,
            pa_model: PaModel::None,
            pa_smoothness: 2.0,
            pa_ibo_db: 6.0,
        }
    }
}

impl ImpairmentSpec {
    pub fn ideal() -> Self {
        Self {
            pn_linewidth_ref_hz: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pn_linewidth_ref_hz >= 0.0 && self.pn_linewidth_ref_hz.is_finite()) {
            return Err(Error::param("phase-noise linewidth must be >= 0"));
        }
        if !(self.pn_ref_carrier_hz > 0.0) {
            return Err(Error::param("phase-noise reference carrier must be positive"));
        }
        if !(self.pa_smoothness > 0.0 && self.pa_smoothness.is_finite()) {
            return Err(Error::param("PA smoothness must be positive"));
        }
        if !self.pa_ibo_db.is_finite() {
            return Err(Error::param("PA backoff must be finite"));
        }
        Ok(())
    }

    /// Linewidth scaled to `carrier_hz`: quadratic in frequency, i.e. +6 dB
    /// per doubling of the carrier.
    pub fn linewidth_at(&self, carrier_hz: f64) -> f64 {
        let ratio = carrier_hz / self.pn_ref_carrier_hz;
        self.pn_linewidth_ref_hz * ratio * ratio
    }

    /// Variance of one Wiener phase increment, `2πβ/fs`.
    pub fn pn_increment_variance(&self, carrier_hz: f64, sample_rate: f64) -> f64 {
        TAU * self.linewidth_at(carrier_hz) / sample_rate
    }
}

/// Multiplies the samples by `e^{jφ_k}` for a Wiener phase process starting
/// at `φ_0 = 0`.
pub fn apply_phase_noise(
    x: &ComplexBuffer,
    imp: &ImpairmentSpec,
    carrier_hz: f64,
    sample_rate: f64,
    rng: &mut SimRng,
) -> Result<ComplexBuffer> {
    imp.validate()?;
    let var = imp.pn_increment_variance(carrier_hz, sample_rate);
    if var == 0.0 {
        return Ok(x.clone());
    }
    let sigma = var.sqrt();
    let mut phase = 0.0;
    let out = x
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if k > 0 {
                phase += sigma * rng.normal();
            }
            z * C64::from_polar(1.0, phase)
        })
        .collect();
    ComplexBuffer::new(out)
}

/// Rapp AM/AM characteristic: `a / (1 + (a/sat)^{2p})^{1/(2p)}`.
pub fn rapp(amplitude: f64, saturation: f64, smoothness: f64) -> f64 {
    let two_p = 2.0 * smoothness;
    amplitude / (1.0 + (amplitude / saturation).powf(two_p)).powf(1.0 / two_p)
}

/// Memoryless PA. Saturation sits `pa_ibo_db` above the signal RMS; phase is
/// untouched. With `PaModel::None` the input passes through.
pub fn apply_pa(x: &ComplexBuffer, imp: &ImpairmentSpec) -> Result<ComplexBuffer> {
    imp.validate()?;
    if imp.pa_model == PaModel::None {
        return Ok(x.clone());
    }
    let rms = x.mean_power().sqrt();
    if rms == 0.0 {
        return Ok(x.clone());
    }
    let sat = rms * 10f64.powf(imp.pa_ibo_db / 20.0);
    let out = x
        .iter()
        .map(|z| {
            let a = z.norm();
            if a == 0.0 {
                *z
            } else {
                z * (rapp(a, sat, imp.pa_smoothness) / a)
            }
        })
        .collect();
    ComplexBuffer::new(out)
}
