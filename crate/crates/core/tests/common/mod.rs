//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls the library's transforms; every sum is written out.
#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use thz_isac::channel::PathSpec;
use thz_isac::numerics::SimRng;
use thz_isac::waveform::{Domain, Grid, WaveformConfig, WaveformKind};
use thz_isac::C64;

pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

fn signed(q: usize, len: usize) -> f64 {
    if 2 * q >= len {
        q as f64 - len as f64
    } else {
        q as f64
    }
}

fn is_otfs_family(kind: WaveformKind) -> bool {
    matches!(kind, WaveformKind::Otfs | WaveformKind::DftsOtfs)
}

/// Equalizer-domain grid (column-major, `M` rows) to time-frequency.
fn to_tf(x: &[C64], kind: WaveformKind, m: usize, n: usize) -> Vec<C64> {
    if !is_otfs_family(kind) {
        return x.to_vec();
    }
    let scale = 1.0 / ((m * n) as f64).sqrt();
    let mut out = vec![C64::default(); m * n];
    for col in 0..n {
        for row in 0..m {
            let mut acc = C64::default();
            for k in 0..n {
                for l in 0..m {
                    let ph = -TAU * (row * l) as f64 / m as f64 + TAU * (col * k) as f64 / n as f64;
                    acc += x[k * m + l] * cis(ph);
                }
            }
            out[col * m + row] = acc * scale;
        }
    }
    out
}

fn from_tf(y: &[C64], kind: WaveformKind, m: usize, n: usize) -> Vec<C64> {
    if !is_otfs_family(kind) {
        return y.to_vec();
    }
    let scale = 1.0 / ((m * n) as f64).sqrt();
    let mut out = vec![C64::default(); m * n];
    for k in 0..n {
        for l in 0..m {
            let mut acc = C64::default();
            for col in 0..n {
                for row in 0..m {
                    let ph = TAU * (row * l) as f64 / m as f64 - TAU * (col * k) as f64 / n as f64;
                    acc += y[col * m + row] * cis(ph);
                }
            }
            out[k * m + l] = acc * scale;
        }
    }
    out
}

/// CP-OFDM modulation by direct inverse DFT sums.
pub fn ofdm_modulate(tf: &[C64], cfg: &WaveformConfig) -> Vec<C64> {
    let (m, n, cp) = (cfg.subcarriers, cfg.symbols, cfg.cp_len);
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = Vec::with_capacity(n * (m + cp));
    for col in 0..n {
        let body: Vec<C64> = (0..m)
            .map(|t| (0..m).map(|sc| tf[col * m + sc] * cis(TAU * (sc * t) as f64 / m as f64)).sum::<C64>() * scale)
            .collect();
        out.extend_from_slice(&body[m - cp..]);
        out.extend_from_slice(&body);
    }
    out
}

pub fn ofdm_demodulate(rx: &[C64], cfg: &WaveformConfig) -> Vec<C64> {
    let (m, n, cp) = (cfg.subcarriers, cfg.symbols, cfg.cp_len);
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = vec![C64::default(); m * n];
    for col in 0..n {
        let start = col * (m + cp) + cp;
        for sc in 0..m {
            out[col * m + sc] = (0..m)
                .map(|t| rx[start + t] * cis(-TAU * (sc * t) as f64 / m as f64))
                .sum::<C64>()
                * scale;
        }
    }
    out
}

/// Periodic band-limited interpolation kernel `(1/L) Σ_q e^{j2π f_q t/L}`
/// with signed bins (the Nyquist bin counted as negative).
pub fn kernel(t: f64, len: usize) -> C64 {
    (0..len).map(|q| cis(TAU * signed(q, len) * t / len as f64)).sum::<C64>() / len as f64
}

/// `y_k = Σ_p g_p e^{j2πν_p k/fs} Σ_j x_j D(k − j − τ_p fs)`.
pub fn propagate(x: &[C64], paths: &[PathSpec], fs: f64) -> Vec<C64> {
    let len = x.len();
    let mut y = vec![C64::default(); len];
    for p in paths {
        let d = p.delay * fs;
        let taps: Vec<C64> = (0..len).map(|s| kernel(s as f64 - d, len)).collect();
        for (k, yk) in y.iter_mut().enumerate() {
            let mut acc = C64::default();
            for (j, xj) in x.iter().enumerate() {
                acc += xj * taps[(k + len - j) % len];
            }
            *yk += p.gain * cis(TAU * p.doppler * k as f64 / fs) * acc;
        }
    }
    y
}

/// The whole equalizer-domain channel chain, one grid in, one grid out.
pub fn chain(x: &[C64], cfg: &WaveformConfig, paths: &[PathSpec]) -> Vec<C64> {
    let (m, n) = (cfg.subcarriers, cfg.symbols);
    let tx = ofdm_modulate(&to_tf(x, cfg.kind, m, n), cfg);
    let rx = propagate(&tx, paths, cfg.sample_rate());
    from_tf(&ofdm_demodulate(&rx, cfg), cfg.kind, m, n)
}

/// Dense matrix of a linear map on `dim`-vectors, by unit-vector probing.
pub fn probe(dim: usize, mut f: impl FnMut(&[C64]) -> Vec<C64>) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = vec![C64::default(); dim];
        e[j] = C64::new(1.0, 0.0);
        let col = f(&e);
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    a
}

pub fn rel_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn lstsq(a: &DMatrix<C64>, b: &[C64]) -> Vec<C64> {
    let rhs = DVector::from_column_slice(b);
    a.clone().svd(true, true).solve(&rhs, 1e-12).expect("SVD solve").as_slice().to_vec()
}

pub fn grid(cfg: &WaveformConfig, domain: Domain, data: Vec<C64>) -> Grid {
    Grid::from_vec(cfg.subcarriers, cfg.symbols, domain, data)
}

pub fn random_vec(len: usize, rng: &mut SimRng) -> Vec<C64> {
    (0..len).map(|_| rng.complex_gaussian(1.0)).collect()
}

/// Two paths with fractional delay inside the prefix and fractional Doppler
/// up to a tenth of the subcarrier spacing.
pub fn random_two_path(cfg: &WaveformConfig, rng: &mut SimRng) -> Vec<PathSpec> {
    let max_delay = cfg.cp_len as f64 / cfg.sample_rate();
    (0..2)
        .map(|_| {
            let gain = rng.complex_gaussian(1.0);
            let delay = rng.uniform() * max_delay;
            let doppler = (2.0 * rng.uniform() - 1.0) * 0.1 * cfg.subcarrier_spacing_hz;
            PathSpec::new(gain, delay, doppler).unwrap()
        })
        .collect()
}
