//! Communication receivers with perfect channel knowledge: one-tap
//! equalization on the time-frequency grid and an iterative least-squares
//! equalizer that works on the exact frame-level channel operator.

use std::f64::consts::TAU;

use crate::channel::{apply_channel, propagate, propagate_adjoint, ChannelSpec, PathSpec};
use crate::numerics::{energy, qam_demap, SimRng};
use crate::waveform::{
    self, equalizer_domain_to_native, random_frame, PilotPattern, equalizer_domain_to_tf, tf_to_equalizer_domain, Domain, Grid, PilotMask,
    WaveformConfig, WaveformKind,
};
use crate::{Error, Result, C64};

/// The end-to-end linear map from the equalizer-domain grid at the
/// transmitter to the same grid at the receiver: CP-OFDM modulation,
/// multipath propagation over the whole frame, CP removal and demodulation.
///
/// The equalizer domain is the time-frequency grid for OFDM and DFT-s-OFDM
/// and the (Doppler-precoded) delay-Doppler grid for OTFS and DFT-s-OTFS.
/// Each application costs one frame FFT plus one inverse FFT per path, all
/// other stages being per-symbol FFTs.
#[derive(Debug, Clone)]
pub struct DDChannelOperator {
    cfg: WaveformConfig,
    paths: Vec<PathSpec>,
}

impl DDChannelOperator {
    pub fn new(cfg: &WaveformConfig, paths: Vec<PathSpec>) -> Result<Self> {
        cfg.validate()?;
        if paths.is_empty() {
            return Err(Error::param("channel operator needs at least one path"));
        }
        for p in &paths {
            p.validate()?;
        }
        Ok(Self { cfg: *cfg, paths })
    }

    pub fn config(&self) -> &WaveformConfig {
        &self.cfg
    }

    pub fn paths(&self) -> &[PathSpec] {
        &self.paths
    }

    pub fn sample_rate(&self) -> f64 {
        self.cfg.sample_rate()
    }

    pub fn domain(&self) -> Domain {
        self.cfg.kind.native_domain()
    }

    fn check(&self, g: &Grid) -> Result<()> {
        self.cfg.check_grid(g)
    }

    pub fn apply(&self, x: &Grid) -> Result<Grid> {
        self.check(x)?;
        let tf = equalizer_domain_to_tf(x, &self.cfg);
        let tx = waveform::ofdm_modulate(&tf, &self.cfg);
        let rx = propagate(&tx, &self.paths, self.sample_rate());
        let tf_rx = waveform::ofdm_demodulate(&rx, &self.cfg);
        Ok(tf_to_equalizer_domain(&tf_rx, &self.cfg))
    }

    /// `Aᴴ y`, each stage replaced by its adjoint in reverse order.
    pub fn apply_adjoint(&self, y: &Grid) -> Result<Grid> {
        self.check(y)?;
        // the domain maps are unitary, so their adjoints are their inverses
        let tf = equalizer_domain_to_tf(y, &self.cfg);
        let rx = waveform::ofdm_demodulate_adjoint(&tf, &self.cfg);
        let tx = propagate_adjoint(&rx, &self.paths, self.sample_rate());
        let tf_tx = waveform::ofdm_modulate_adjoint(&tx, &self.cfg);
        Ok(tf_to_equalizer_domain(&tf_tx, &self.cfg))
    }

    /// Per resource element gain on the time-frequency grid, ignoring
    /// inter-carrier and inter-symbol leakage:
    /// `H[m,n] = Σ g·e^{-j2π f_m τ}·e^{j2πν t_n}·(1/M)Σ_k e^{j2πνk/fs}`, with
    /// `t_n` the first body sample of symbol `n`.
    pub fn tf_gains(&self) -> Grid {
        let cfg = &self.cfg;
        let (m, n) = (cfg.subcarriers, cfg.symbols);
        let fs = cfg.sample_rate();
        let mut h = Grid::zeros(m, n, Domain::TimeFrequency);
        for p in &self.paths {
            let leak: C64 = (0..m)
                .map(|k| C64::from_polar(1.0, TAU * p.doppler * k as f64 / fs))
                .sum::<C64>()
                / m as f64;
            for col in 0..n {
                let start = (col * cfg.symbol_len() + cfg.cp_len) as f64 / fs;
                let rot = p.gain * leak * C64::from_polar(1.0, TAU * p.doppler * start);
                for row in 0..m {
                    let ramp = C64::from_polar(1.0, -TAU * cfg.subcarrier_freq(row) * p.delay);
                    let v = h.get(row, col) + rot * ramp;
                    h.set(row, col, v);
                }
            }
        }
        h
    }
}

pub fn apply_operator(op: &DDChannelOperator, x: &Grid) -> Result<Grid> {
    op.apply(x)
}

#[derive(Debug, Clone)]
pub struct OneTapOutput {
    pub grid: Grid,
    /// Resource elements whose gain was zero under zero forcing; their
    /// output is zero and they should not be trusted.
    pub excluded: PilotMask,
}

/// `rx·conj(h)/(|h|² + 1/snr)`; `snr = None` means zero forcing.
pub fn equalize_onetap(rx: &Grid, gains: &Grid, snr_linear: Option<f64>) -> Result<OneTapOutput> {
    if !rx.same_shape(gains) {
        return Err(Error::Dimension {
            expected_rows: rx.rows(),
            expected_cols: rx.cols(),
            rows: gains.rows(),
            cols: gains.cols(),
        });
    }
    let reg = snr_linear.map_or(0.0, |s| 1.0 / s);
    let mut out = rx.clone();
    let mut excluded = vec![false; rx.len()];
    for (i, (o, h)) in out.as_mut_slice().iter_mut().zip(gains.as_slice()).enumerate() {
        let den = h.norm_sqr() + reg;
        if den == 0.0 {
            *o = C64::default();
            excluded[i] = true;
        } else {
            *o = *o * h.conj() / den;
        }
    }
    let excluded = PilotMask::from_fn(rx.rows(), rx.cols(), |r, c| excluded[c * rx.rows() + r]);
    Ok(OneTapOutput { grid: out, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsOptions {
    pub max_iters: usize,
    /// Stop once the relative residual falls below this.
    pub tol: f64,
    /// Ridge weight `λ` in `‖Ax − b‖² + λ‖x‖²`; the noise variance for noisy
    /// frames, zero otherwise.
    pub ridge: f64,
}

impl Default for LsOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-6,
            ridge: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LsSolution {
    pub grid: Grid,
    pub iterations: usize,
    /// Final `‖b − Ax‖/‖b‖`.
    pub residual: f64,
    /// `√(‖b − Ax‖² + λ‖x‖²)/‖b‖` after every iteration, starting with the
    /// zero initial guess.
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Conjugate gradient on the (ridge) normal equations
/// `(AᴴA + λI)x = Aᴴb`, in the CGLS arrangement that never forms `AᴴA`.
///
/// Iteration stops when either `‖b − Ax‖/‖b‖` or the normal-equation
/// residual `‖Aᴴ(b − Ax) − λx‖/‖Aᴴb‖` drops below `tol`. Three consecutive
/// increases of the regularized objective abort with
/// [`Error::Divergence`].
pub fn equalize_iterative_ls(rx: &Grid, op: &DDChannelOperator, opts: &LsOptions) -> Result<LsSolution> {
    op.check(rx)?;
    let lambda = opts.ridge;
    let b_norm = energy(rx.as_slice()).sqrt();
    let mut x = Grid::zeros(rx.rows(), rx.cols(), rx.domain());
    if b_norm == 0.0 {
        return Ok(LsSolution {
            grid: x,
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
            converged: true,
        });
    }
    let mut r = rx.clone();
    let mut s = op.apply_adjoint(&r)?;
    let s0_norm = energy(s.as_slice()).sqrt();
    let mut p = s.clone();
    let mut gamma = energy(s.as_slice());
    let mut history = vec![1.0];
    let mut rises = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        if gamma == 0.0 {
            converged = true;
            break;
        }
        let q = op.apply(&p)?;
        let denom = energy(q.as_slice()) + lambda * energy(p.as_slice());
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::NonFinite(format!("CG step denominator {denom}")));
        }
        let alpha = gamma / denom;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        iterations += 1;

        s = op.apply_adjoint(&r)?;
        if lambda != 0.0 {
            axpy(-lambda, &x, &mut s);
        }
        let gamma_new = energy(s.as_slice());
        let objective = energy(r.as_slice()) + lambda * energy(x.as_slice());
        let rel = objective.sqrt() / b_norm;
        if !rel.is_finite() {
            return Err(Error::NonFinite(format!("LS residual at iteration {iterations}")));
        }
        let prev = *history.last().expect("history starts non-empty");
        if rel > prev * (1.0 + 1e-12) {
            rises += 1;
            if rises >= 3 {
                history.push(rel);
                return Err(Error::Divergence {
                    iteration: iterations,
                    history,
                });
            }
        } else {
            rises = 0;
        }
        history.push(rel);

        let data_rel = energy(r.as_slice()).sqrt() / b_norm;
        let normal_rel = gamma_new.sqrt() / s0_norm;
        if data_rel < opts.tol || normal_rel < opts.tol {
            converged = true;
            break;
        }
        let beta = gamma_new / gamma;
        gamma = gamma_new;
        for (pi, si) in p.as_mut_slice().iter_mut().zip(s.as_slice()) {
            *pi = si + *pi * beta;
        }
    }
    Ok(LsSolution {
        residual: energy(r.as_slice()).sqrt() / b_norm,
        grid: x,
        iterations,
        history,
        converged,
    })
}

fn axpy(a: f64, x: &Grid, y: &mut Grid) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += xi * a;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub bits: Vec<u8>,
    pub errors: usize,
    pub ber: f64,
}

/// Hard-decision demapping of every data resource element of an equalized
/// native grid, in the same order `modulate` filled them.
pub fn detect_bits(eq_native: &Grid, cfg: &WaveformConfig, mask: &PilotMask, reference: &[u8]) -> Result<Detection> {
    cfg.check_grid(eq_native)?;
    let data: Vec<C64> = eq_native
        .as_slice()
        .iter()
        .zip(mask.flags())
        .filter(|(_, &pilot)| !pilot)
        .map(|(z, _)| *z)
        .collect();
    let bits = qam_demap(&data, cfg.mod_order);
    if bits.len() != reference.len() {
        return Err(Error::Length {
            what: "reference bits",
            expected: bits.len(),
            actual: reference.len(),
        });
    }
    let errors = bits.iter().zip(reference).filter(|(a, b)| a != b).count();
    let ber = if bits.is_empty() {
        0.0
    } else {
        errors as f64 / bits.len() as f64
    };
    Ok(Detection { bits, errors, ber })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equalizer {
    OneTap,
    IterativeLs(LsOptions),
}

impl Equalizer {
    /// One-tap for the OFDM family, iterative LS for the OTFS family.
    pub fn default_for(kind: WaveformKind) -> Self {
        match kind {
            WaveformKind::Ofdm | WaveformKind::DftsOfdm => Equalizer::OneTap,
            WaveformKind::Otfs | WaveformKind::DftsOtfs => Equalizer::IterativeLs(LsOptions::default()),
        }
    }
}

/// Full communication receiver: demodulates `rx`, equalizes with known
/// `paths`, and returns the native grid ready for [`detect_bits`].
///
/// `noise_variance` is the per-sample noise variance (0 for noiseless runs);
/// it sets the MMSE term of the one-tap equalizer and the ridge weight of
/// iterative LS. For DFT-s-OTFS the equalizer works on the precoded
/// delay-Doppler grid and the Doppler-axis DFT is undone afterwards.
pub fn equalize_frame(
    rx: &[C64],
    cfg: &WaveformConfig,
    paths: &[PathSpec],
    noise_variance: f64,
    equalizer: Equalizer,
) -> Result<Grid> {
    let tf = waveform::demodulate_tf(rx, cfg)?;
    let op = DDChannelOperator::new(cfg, paths.to_vec())?;
    let eq = match equalizer {
        Equalizer::OneTap => {
            let snr = (noise_variance > 0.0).then(|| 1.0 / noise_variance);
            let out = equalize_onetap(&tf, &op.tf_gains(), snr)?;
            tf_to_equalizer_domain(&out.grid, cfg)
        }
        Equalizer::IterativeLs(mut opts) => {
            if opts.ridge == 0.0 {
                opts.ridge = noise_variance;
            }
            let y = tf_to_equalizer_domain(&tf, cfg);
            equalize_iterative_ls(&y, &op, &opts)?.grid
        }
    };
    Ok(equalizer_domain_to_native(&eq, cfg))
}

/// One frame of random payload through `paths` at `snr_db` (`None` for
/// noiseless), equalized with known channel state.
pub fn ber_trial(
    cfg: &WaveformConfig,
    paths: &[PathSpec],
    snr_db: Option<f64>,
    equalizer: Equalizer,
    rng: &mut SimRng,
) -> Result<Detection> {
    let pilots = PilotPattern::none(cfg);
    let frame = random_frame(cfg, &pilots, rng)?;
    let spec = ChannelSpec::new(paths.to_vec(), snr_db)?;
    let out = apply_channel(&frame.samples, &spec, cfg.sample_rate(), cfg.cp_len, rng)?;
    let eq = equalize_frame(&out.samples, cfg, paths, out.noise_variance, equalizer)?;
    detect_bits(&eq, cfg, pilots.mask(), &frame.payload_bits)
}
