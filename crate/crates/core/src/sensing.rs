//! Monostatic range/velocity estimation for each waveform and Monte-Carlo
//! RMSE evaluation.
//!
//! | waveform    | estimator                                             |
//! |-------------|-------------------------------------------------------|
//! | OFDM        | [`estimate_ofdm_radar`], division by the data symbols |
//! | DFT-s-OFDM  | [`estimate_pilot_based`] on a dedicated ZC symbol     |
//! | OTFS        | [`estimate_dd_ambiguity`] on the time-domain frame    |
//! | DFT-s-OTFS  | [`estimate_dd_ambiguity`]                             |
//!
//! All three locate the peak of a 16× zero-padded periodogram and refine it
//! with a three-point parabola along each axis.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::channel::{apply_channel, echo_channel, SensingScenario};
use crate::numerics::{fft_in_place, signed_bin, SimRng};
use crate::waveform::{demodulate_tf, random_frame, Domain, Frame, Grid, PilotMask, PilotPattern, PilotScheme, WaveformConfig, WaveformKind};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};

pub const ZERO_PAD: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensingMethod {
    OfdmRadar,
    PilotPeriodogram,
    DelayDopplerAmbiguity,
}

impl SensingMethod {
    pub fn for_kind(kind: WaveformKind) -> Self {
        match kind {
            WaveformKind::Ofdm => SensingMethod::OfdmRadar,
            WaveformKind::DftsOfdm => SensingMethod::PilotPeriodogram,
            WaveformKind::Otfs | WaveformKind::DftsOtfs => SensingMethod::DelayDopplerAmbiguity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SensingMethod::OfdmRadar => "ofdm-radar",
            SensingMethod::PilotPeriodogram => "pilot-periodogram",
            SensingMethod::DelayDopplerAmbiguity => "dd-ambiguity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingEstimate {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub delay_s: f64,
    pub doppler_hz: f64,
    /// Peak power over mean power of the search surface.
    pub peak_snr_db: f64,
    pub method: SensingMethod,
    /// False when the pilots span a single symbol and no Doppler estimate
    /// could be formed.
    pub velocity_resolved: bool,
}

impl SensingEstimate {
    fn from_delay_doppler(delay_s: f64, doppler_hz: f64, peak_snr_db: f64, method: SensingMethod, carrier_hz: f64) -> Self {
        Self {
            range_m: SPEED_OF_LIGHT * delay_s / 2.0,
            velocity_mps: SPEED_OF_LIGHT * doppler_hz / (2.0 * carrier_hz),
            delay_s,
            doppler_hz,
            peak_snr_db,
            method,
            velocity_resolved: true,
        }
    }
}

/// Coarse range bin `c/(2·M·Δf)`.
pub fn range_resolution(cfg: &WaveformConfig) -> f64 {
    SPEED_OF_LIGHT / (2.0 * cfg.sample_rate())
}

/// Wraps a fractional circular bin into `[0, len)`, except that values
/// within `reach` below `len` are refinements of the zero bin that went
/// slightly negative; those clamp to zero.
fn delay_bin_from_circular(bin: f64, len: usize, reach: f64) -> f64 {
    let b = bin.rem_euclid(len as f64);
    if b > len as f64 - reach {
        0.0
    } else {
        b
    }
}

/// Vertex offset of the parabola through three equally spaced samples, in
/// samples relative to the middle one.
fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let den = left - 2.0 * mid + right;
    if den >= 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / den).clamp(-0.5, 0.5)
}

/// Regular pilot lattice: rows sorted by ascending baseband frequency with a
/// constant step, columns ascending with a constant step.
struct Lattice {
    rows: Vec<usize>,
    cols: Vec<usize>,
    freq_step_hz: f64,
    time_step_s: f64,
}

fn lattice(mask: &PilotMask, cfg: &WaveformConfig) -> Result<Lattice> {
    let (m, n) = (cfg.subcarriers, cfg.symbols);
    let mut rows: Vec<usize> = (0..m).filter(|&r| (0..n).any(|c| mask.is_pilot(r, c))).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| (0..m).any(|r| mask.is_pilot(r, c))).collect();
    if rows.is_empty() {
        return Err(Error::precondition("pilot mask is empty"));
    }
    if rows.len() < 2 {
        return Err(Error::precondition("delay estimation needs at least two pilot subcarriers"));
    }
    for &c in &cols {
        for &r in &rows {
            if !mask.is_pilot(r, c) {
                return Err(Error::precondition("pilot mask is not a regular lattice"));
            }
        }
    }
    rows.sort_by(|&a, &b| signed_bin(a, m).total_cmp(&signed_bin(b, m)));
    let freq = |r: usize| signed_bin(r, m);
    let step = freq(rows[1]) - freq(rows[0]);
    if rows.windows(2).any(|w| freq(w[1]) - freq(w[0]) != step) {
        return Err(Error::precondition("pilot subcarriers are not equally spaced"));
    }
    let col_step = if cols.len() > 1 { cols[1] - cols[0] } else { 1 };
    if cols.windows(2).any(|w| w[1] - w[0] != col_step) {
        return Err(Error::precondition("pilot symbols are not equally spaced"));
    }
    Ok(Lattice {
        rows,
        cols,
        freq_step_hz: step * cfg.subcarrier_spacing_hz,
        time_step_s: col_step as f64 * cfg.symbol_period(),
    })
}

struct PeakSearch {
    /// Fractional delay bin in `[0, pad·K)`.
    delay_bin: f64,
    /// Fractional signed Doppler bin.
    doppler_bin: f64,
    delay_bins: usize,
    doppler_bins: usize,
    peak_snr_db: f64,
}

/// Delay-Doppler periodogram of channel samples `h[i][j]` on a lattice with
/// `K` rows (ascending frequency) and `J` columns, stored column-major.
fn periodogram_peak(h: &[C64], k_rows: usize, j_cols: usize) -> PeakSearch {
    let dk = ZERO_PAD * k_rows;
    let dj = if j_cols > 1 { ZERO_PAD * j_cols } else { 1 };
    // delay profiles, one per pilot column
    let mut profiles = vec![C64::default(); dk * j_cols];
    for j in 0..j_cols {
        let col = &mut profiles[j * dk..(j + 1) * dk];
        col[..k_rows].copy_from_slice(&h[j * k_rows..(j + 1) * k_rows]);
        fft_in_place(col, true);
    }
    // Doppler transform per delay bin
    let mut power = vec![0.0; dk * dj];
    let mut buf = vec![C64::default(); dj];
    for q in 0..dk {
        buf.iter_mut().for_each(|z| *z = C64::default());
        for j in 0..j_cols {
            buf[j] = profiles[j * dk + q];
        }
        if dj > 1 {
            fft_in_place(&mut buf, false);
        }
        for (p, z) in buf.iter().enumerate() {
            power[q * dj + p] = z.norm_sqr();
        }
    }
    let (best, &peak) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty periodogram");
    let (q0, p0) = (best / dj, best % dj);
    let mag = |q: usize, p: usize| power[q * dj + p].sqrt();
    let dq = parabolic_offset(mag((q0 + dk - 1) % dk, p0), mag(q0, p0), mag((q0 + 1) % dk, p0));
    let dp = if dj > 1 {
        parabolic_offset(mag(q0, (p0 + dj - 1) % dj), mag(q0, p0), mag(q0, (p0 + 1) % dj))
    } else {
        0.0
    };
    let mean = power.iter().sum::<f64>() / power.len() as f64;
    PeakSearch {
        delay_bin: delay_bin_from_circular(q0 as f64 + dq, dk, 0.5),
        doppler_bin: if dj > 1 { signed_bin(p0, dj) + dp } else { 0.0 },
        delay_bins: dk,
        doppler_bins: dj,
        peak_snr_db: 10.0 * (peak / mean).log10(),
    }
}

fn estimate_on_lattice(
    rx: &Grid,
    reference: &Grid,
    lat: &Lattice,
    cfg: &WaveformConfig,
    method: SensingMethod,
) -> (SensingEstimate, PeakSearch) {
    let (k, j) = (lat.rows.len(), lat.cols.len());
    let mut h = Vec::with_capacity(k * j);
    for &c in &lat.cols {
        for &r in &lat.rows {
            h.push(rx.get(r, c) / reference.get(r, c));
        }
    }
    let peak = periodogram_peak(&h, k, j);
    let delay = peak.delay_bin / (peak.delay_bins as f64 * lat.freq_step_hz);
    let doppler = if j > 1 {
        peak.doppler_bin / (peak.doppler_bins as f64 * lat.time_step_s)
    } else {
        0.0
    };
    let est = SensingEstimate::from_delay_doppler(delay, doppler, peak.peak_snr_db, method, cfg.carrier_hz);
    (est, peak)
}

/// Classical OFDM radar: divide the received grid by the transmitted one,
/// inverse DFT along frequency, DFT along time, refined 2-D peak.
pub fn estimate_ofdm_radar(tx: &Grid, rx: &Grid, cfg: &WaveformConfig) -> Result<SensingEstimate> {
    cfg.validate()?;
    cfg.check_grid(tx)?;
    cfg.check_grid(rx)?;
    if tx.as_slice().iter().any(|z| z.norm_sqr() == 0.0) {
        return Err(Error::precondition(
            "OFDM radar divides by every transmitted symbol; found an empty resource element",
        ));
    }
    let lat = lattice(&PilotMask::full(cfg.subcarriers, cfg.symbols), cfg)?;
    Ok(estimate_on_lattice(rx, tx, &lat, cfg, SensingMethod::OfdmRadar).0)
}

/// Same periodogram restricted to pilot resource elements, which must have a
/// constant envelope so the division does not amplify noise.
///
/// With a single pilot symbol there is no slow-time axis; if that symbol
/// spans every subcarrier the Doppler is taken from the sample-to-sample
/// phase progression of the received pilot after the estimated delay is
/// removed, otherwise the velocity is reported as unresolved.
pub fn estimate_pilot_based(
    rx: &Grid,
    mask: &PilotMask,
    pilot_values: &Grid,
    cfg: &WaveformConfig,
) -> Result<SensingEstimate> {
    cfg.validate()?;
    cfg.check_grid(rx)?;
    cfg.check_grid(pilot_values)?;
    if mask.rows() != cfg.subcarriers || mask.cols() != cfg.symbols {
        return Err(Error::Dimension {
            expected_rows: cfg.subcarriers,
            expected_cols: cfg.symbols,
            rows: mask.rows(),
            cols: mask.cols(),
        });
    }
    if mask.is_empty() {
        return Err(Error::precondition("pilot mask is empty"));
    }
    let mags: Vec<f64> = pilot_values
        .as_slice()
        .iter()
        .zip(mask.flags())
        .filter(|(_, &f)| f)
        .map(|(z, _)| z.norm())
        .collect();
    let env = mags[0];
    if env == 0.0 || mags.iter().any(|&a| (a - env).abs() > 1e-9 * env) {
        return Err(Error::precondition("pilots must have a constant, non-zero envelope"));
    }
    let lat = lattice(mask, cfg)?;
    let (mut est, _) = estimate_on_lattice(rx, pilot_values, &lat, cfg, SensingMethod::PilotPeriodogram);
    if lat.cols.len() == 1 {
        if lat.rows.len() == cfg.subcarriers {
            let nu = single_symbol_doppler(rx, pilot_values, lat.cols[0], est.delay_s, cfg);
            est = SensingEstimate::from_delay_doppler(est.delay_s, nu, est.peak_snr_db, est.method, cfg.carrier_hz);
        } else {
            est.doppler_hz = 0.0;
            est.velocity_mps = 0.0;
            est.velocity_resolved = false;
        }
    }
    Ok(est)
}

fn single_symbol_doppler(rx: &Grid, pilots: &Grid, col: usize, delay_s: f64, cfg: &WaveformConfig) -> f64 {
    let fs = cfg.sample_rate();
    let mut received = rx.column(col).to_vec();
    fft_in_place(&mut received, true);
    let mut expected: Vec<C64> = pilots
        .column(col)
        .iter()
        .enumerate()
        .map(|(m, p)| p * C64::from_polar(1.0, -TAU * cfg.subcarrier_freq(m) * delay_s))
        .collect();
    fft_in_place(&mut expected, true);
    let z: Vec<C64> = received.iter().zip(&expected).map(|(r, e)| r * e.conj()).collect();
    // a long lag keeps the reference's residual delay error from dominating;
    // half a symbol still leaves ±Δf unambiguous
    let lag = (z.len() / 2).max(1);
    let acc: C64 = (0..z.len() - lag).map(|k| z[k + lag] * z[k].conj()).sum();
    acc.arg() * fs / (TAU * lag as f64)
}

/// Cross-ambiguity `A(τ,ν) = Σ_k rx_k·conj(tx_{k−τ})·e^{−j2πνk/fs}` of whole
/// frames.
///
/// A coarse pass evaluates every circular lag by FFT for `N` Doppler
/// hypotheses spaced by the inverse frame duration (the Doppler span of one
/// delay-Doppler grid). The ±1 coarse bin neighbourhood of the strongest
/// cell is then re-evaluated on a 16× finer lattice in both axes, which gives
/// the same samples a 16× zero-padded transform would, before parabolic
/// refinement.
pub fn estimate_dd_ambiguity(tx: &[C64], rx: &[C64], cfg: &WaveformConfig) -> Result<SensingEstimate> {
    cfg.validate()?;
    if tx.len() != rx.len() {
        return Err(Error::Length {
            what: "received frame",
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    if tx.is_empty() {
        return Err(Error::precondition("empty frames"));
    }
    let len = tx.len();
    let fs = cfg.sample_rate();
    let dop_step = fs / len as f64;
    let mut tx_spec = tx.to_vec();
    fft_in_place(&mut tx_spec, false);

    let cross_spectrum = |nu: f64| -> Vec<C64> {
        let mut r: Vec<C64> = rx
            .iter()
            .enumerate()
            .map(|(k, v)| v * C64::from_polar(1.0, -TAU * nu * k as f64 / fs))
            .collect();
        fft_in_place(&mut r, false);
        r.iter().zip(&tx_spec).map(|(a, b)| a * b.conj()).collect()
    };

    let hyps = cfg.symbols.max(2);
    let mut best = (0.0, 0i64, 0usize);
    let mut total = 0.0;
    for d in -(hyps as i64 / 2)..(hyps as i64 - hyps as i64 / 2) {
        let mut c = cross_spectrum(d as f64 * dop_step);
        fft_in_place(&mut c, true);
        for (lag, z) in c.iter().enumerate() {
            let p = z.norm_sqr();
            total += p;
            if p > best.0 {
                best = (p, d, lag);
            }
        }
    }
    let (coarse_peak, d0, lag0) = best;
    let mean = total / (hyps * len) as f64;

    let span = ZERO_PAD as i64;
    let width = (2 * span + 1) as usize;
    let mut fine = vec![0.0; width * width];
    let phasors: Vec<Vec<C64>> = (-span..=span)
        .map(|i| {
            let t = lag0 as f64 + i as f64 / ZERO_PAD as f64;
            (0..len)
                .map(|q| C64::from_polar(1.0, TAU * signed_bin(q, len) * t / len as f64))
                .collect()
        })
        .collect();
    for (a, i) in (-span..=span).enumerate() {
        let nu = (d0 as f64 + i as f64 / ZERO_PAD as f64) * dop_step;
        let c = cross_spectrum(nu);
        for (b, ph) in phasors.iter().enumerate() {
            let v: C64 = c.iter().zip(ph).map(|(x, y)| x * y).sum();
            fine[a * width + b] = v.norm();
        }
    }
    let (idx, _) = fine
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty fine grid");
    let (a0, b0) = (idx / width, idx % width);
    let at = |a: usize, b: usize| fine[a * width + b];
    let da = if a0 > 0 && a0 + 1 < width {
        parabolic_offset(at(a0 - 1, b0), at(a0, b0), at(a0 + 1, b0))
    } else {
        0.0
    };
    let db = if b0 > 0 && b0 + 1 < width {
        parabolic_offset(at(a0, b0 - 1), at(a0, b0), at(a0, b0 + 1))
    } else {
        0.0
    };
    // the fine window reaches one coarse lag plus half a fine cell either side
    let reach = 1.0 + 0.5 / ZERO_PAD as f64;
    let lag = delay_bin_from_circular(lag0 as f64 + (b0 as f64 - span as f64 + db) / ZERO_PAD as f64, len, reach);
    let nu = (d0 as f64 + (a0 as f64 - span as f64 + da) / ZERO_PAD as f64) * dop_step;
    let peak_snr_db = 10.0 * (coarse_peak / mean).log10();
    Ok(SensingEstimate::from_delay_doppler(
        lag / fs,
        nu,
        peak_snr_db,
        SensingMethod::DelayDopplerAmbiguity,
        cfg.carrier_hz,
    ))
}

/// Pilot pattern each waveform transmits in a sensing frame.
pub fn sensing_pilots(cfg: &WaveformConfig) -> Result<PilotPattern> {
    match cfg.kind {
        WaveformKind::DftsOfdm => PilotPattern::new(cfg, PilotScheme::DedicatedSymbol),
        _ => Ok(PilotPattern::none(cfg)),
    }
}

/// Runs the waveform's estimator on a transmitted frame and its echo.
pub fn estimate_for_frame(frame: &Frame, rx: &[C64]) -> Result<SensingEstimate> {
    let cfg = &frame.config;
    match SensingMethod::for_kind(cfg.kind) {
        SensingMethod::OfdmRadar => estimate_ofdm_radar(&frame.tf_grid(), &demodulate_tf(rx, cfg)?, cfg),
        SensingMethod::PilotPeriodogram => {
            let (mask, values) = frame.pilots.tf_reference(cfg)?;
            estimate_pilot_based(&demodulate_tf(rx, cfg)?, &mask, &values, cfg)
        }
        SensingMethod::DelayDopplerAmbiguity => estimate_dd_ambiguity(&frame.samples, rx, cfg),
    }
}

/// One Monte-Carlo sensing trial: random payload, echo with a random
/// reflection phase, AWGN at `snr_db` (`None` for noiseless).
pub fn sensing_trial(
    cfg: &WaveformConfig,
    scenario: &SensingScenario,
    snr_db: Option<f64>,
    rng: &mut SimRng,
) -> Result<SensingEstimate> {
    let pilots = sensing_pilots(cfg)?;
    let frame = random_frame(cfg, &pilots, rng)?;
    let mut target = *scenario;
    target.rcs_gain *= rng.unit_phasor();
    let spec = echo_channel(&target, cfg.carrier_hz, snr_db);
    let out = apply_channel(&frame.samples, &spec, cfg.sample_rate(), cfg.cp_len, rng)?;
    estimate_for_frame(&frame, &out.samples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseRow {
    pub kind: WaveformKind,
    pub subcarriers: usize,
    pub symbols: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub true_range_m: f64,
    pub range_mean_m: f64,
    pub range_rmse_m: f64,
    pub velocity_rmse_mps: f64,
    /// Trials whose range error exceeds one coarse range bin.
    pub outliers: usize,
}

pub const MIN_RMSE_TRIALS: usize = 100;

/// RMSE over `trials` independent trials; trial `i` draws from
/// `SimRng::for_trial(seed, i)` so the row does not depend on how rayon
/// schedules the work.
pub fn run_rmse_trials(
    cfg: &WaveformConfig,
    scenario: &SensingScenario,
    snr_db: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<RmseRow> {
    if trials < MIN_RMSE_TRIALS {
        return Err(Error::precondition(format!(
            "RMSE evaluation needs at least {MIN_RMSE_TRIALS} trials, got {trials}"
        )));
    }
    let estimates = (0..trials as u64)
        .into_par_iter()
        .map(|i| sensing_trial(cfg, scenario, snr_db, &mut SimRng::for_trial(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, scenario, snr_db, &estimates))
}

pub fn summarize(
    cfg: &WaveformConfig,
    scenario: &SensingScenario,
    snr_db: Option<f64>,
    estimates: &[SensingEstimate],
) -> RmseRow {
    let n = estimates.len() as f64;
    let bin = range_resolution(cfg);
    let mut sq = 0.0;
    let mut sum = 0.0;
    let mut vsq = 0.0;
    let mut outliers = 0;
    for e in estimates {
        let err = e.range_m - scenario.range_m;
        sq += err * err;
        sum += e.range_m;
        vsq += (e.velocity_mps - scenario.velocity_mps).powi(2);
        if err.abs() > bin {
            outliers += 1;
        }
    }
    RmseRow {
        kind: cfg.kind,
        subcarriers: cfg.subcarriers,
        symbols: cfg.symbols,
        snr_db: snr_db.unwrap_or(f64::INFINITY),
        trials: estimates.len(),
        true_range_m: scenario.range_m,
        range_mean_m: sum / n,
        range_rmse_m: (sq / n).sqrt(),
        velocity_rmse_mps: (vsq / n).sqrt(),
        outliers,
    }
}

/// Helper for tests and examples: the ideal time-frequency response of a
/// single path sampled at symbol starts.
pub fn ideal_tf_response(cfg: &WaveformConfig, gain: C64, delay_s: f64, doppler_hz: f64) -> Grid {
    let t = cfg.symbol_period();
    Grid::from_fn(cfg.subcarriers, cfg.symbols, Domain::TimeFrequency, |m, n| {
        gain * C64::from_polar(1.0, -TAU * cfg.subcarrier_freq(m) * delay_s + TAU * doppler_hz * n as f64 * t)
    })
}
