//! The four transmit/receive symbol chains over an `M`-subcarrier by
//! `N`-symbol frame.
//!
//! Every kind ends in the same inner CP-OFDM modulator; they differ only in
//! how the native symbol grid is carried onto the time-frequency grid:
//!
//! | kind        | native grid                  | native → time-frequency            |
//! |-------------|------------------------------|------------------------------------|
//! | OFDM        | time-frequency               | identity                           |
//! | DFT-s-OFDM  | per-symbol data vectors      | `M`-point DFT of each symbol       |
//! | OTFS        | delay-Doppler                | ISFFT                              |
//! | DFT-s-OTFS  | delay-Doppler                | `N`-point DFT per delay row, ISFFT |
//!
//! The ISFFT is `X = F_M · x · F_Nᴴ` with unitary DFT matrices: an inverse
//! `N`-point DFT along Doppler followed by a forward `M`-point DFT along delay.
//! With that orientation a delay of `d` samples and a Doppler of `k` bins act
//! on the delay-Doppler grid as the shifts `l → l + d`, `k → k + k₀`.

mod grid;
mod pilots;

pub use grid::{Domain, Grid};
pub use pilots::{resource_map, PilotMask, PilotPattern, PilotScheme};

use std::fmt;
use std::str::FromStr;

use crate::numerics::{self, fft_in_place, is_power_of_two, ComplexBuffer, ModOrder, SimRng};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WaveformKind {
    Ofdm,
    DftsOfdm,
    Otfs,
    DftsOtfs,
}

impl WaveformKind {
    pub const ALL: [WaveformKind; 4] = [
        WaveformKind::Ofdm,
        WaveformKind::DftsOfdm,
        WaveformKind::Otfs,
        WaveformKind::DftsOtfs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaveformKind::Ofdm => "OFDM",
            WaveformKind::DftsOfdm => "DFT-s-OFDM",
            WaveformKind::Otfs => "OTFS",
            WaveformKind::DftsOtfs => "DFT-s-OTFS",
        }
    }

    /// Domain of the grid that carries the payload symbols.
    pub fn native_domain(self) -> Domain {
        match self {
            WaveformKind::Ofdm | WaveformKind::DftsOfdm => Domain::TimeFrequency,
            WaveformKind::Otfs | WaveformKind::DftsOtfs => Domain::DelayDoppler,
        }
    }
}

impl fmt::Display for WaveformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for WaveformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "ofdm" => Ok(WaveformKind::Ofdm),
            "dftsofdm" => Ok(WaveformKind::DftsOfdm),
            "otfs" => Ok(WaveformKind::Otfs),
            "dftsotfs" => Ok(WaveformKind::DftsOtfs),
            _ => Err(Error::param(format!("unknown waveform kind '{s}'"))),
        }
    }
}

/// Frame, grid and carrier parameters of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformConfig {
    pub kind: WaveformKind,
    /// Subcarriers per symbol (`M`), power of two.
    pub subcarriers: usize,
    /// Symbols per frame (`N`), power of two.
    pub symbols: usize,
    pub subcarrier_spacing_hz: f64,
    pub carrier_hz: f64,
    /// Cyclic prefix length in samples.
    pub cp_len: usize,
    pub mod_order: ModOrder,
}

pub const DEFAULT_SUBCARRIER_SPACING_HZ: f64 = 1.92e6;
pub const DEFAULT_CARRIER_HZ: f64 = 0.3e12;

impl WaveformConfig {
    /// 0.3 THz carrier, 1.92 MHz spacing, 4-QAM and a cyclic prefix of `M/4`.
    pub fn new(kind: WaveformKind, subcarriers: usize, symbols: usize) -> Self {
        Self {
            kind,
            subcarriers,
            symbols,
            subcarrier_spacing_hz: DEFAULT_SUBCARRIER_SPACING_HZ,
            carrier_hz: DEFAULT_CARRIER_HZ,
            cp_len: subcarriers / 4,
            mod_order: ModOrder::Qam4,
        }
    }

    pub fn with_kind(mut self, kind: WaveformKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.subcarriers, self.symbols);
        if m < 8 || !is_power_of_two(m) {
            return Err(Error::param(format!("M = {m} must be a power of two >= 8")));
        }
        // N = 1 is allowed: a one-symbol frame is how DFT-s-OTFS degenerates
        // into DFT-s-OFDM.
        if !is_power_of_two(n) {
            return Err(Error::param(format!("N = {n} must be a power of two")));
        }
        if self.cp_len >= m {
            return Err(Error::param(format!(
                "cp_len = {} must be shorter than M = {m}",
                self.cp_len
            )));
        }
        if !(self.subcarrier_spacing_hz > 0.0 && self.subcarrier_spacing_hz.is_finite()) {
            return Err(Error::param("subcarrier spacing must be positive"));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(Error::param("carrier frequency must be positive"));
        }
        Ok(())
    }

    pub fn sample_rate(&self) -> f64 {
        self.subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// Samples per CP-OFDM symbol, prefix included.
    pub fn symbol_len(&self) -> usize {
        self.subcarriers + self.cp_len
    }

    pub fn frame_len(&self) -> usize {
        self.symbols * self.symbol_len()
    }

    pub fn grid_len(&self) -> usize {
        self.subcarriers * self.symbols
    }

    /// Symbol period including the cyclic prefix, seconds.
    pub fn symbol_period(&self) -> f64 {
        self.symbol_len() as f64 / self.sample_rate()
    }

    /// Baseband frequency of subcarrier `m` (upper half maps to negative).
    pub fn subcarrier_freq(&self, m: usize) -> f64 {
        numerics::signed_bin(m, self.subcarriers) * self.subcarrier_spacing_hz
    }

    pub fn empty_grid(&self, domain: Domain) -> Grid {
        Grid::zeros(self.subcarriers, self.symbols, domain)
    }

    pub(crate) fn check_grid(&self, g: &Grid) -> Result<()> {
        if g.rows() != self.subcarriers || g.cols() != self.symbols {
            return Err(Error::Dimension {
                expected_rows: self.subcarriers,
                expected_cols: self.symbols,
                rows: g.rows(),
                cols: g.cols(),
            });
        }
        Ok(())
    }
}

/// A modulated frame together with everything needed to check it at the
/// receiver.
#[derive(Debug, Clone)]
pub struct Frame {
    pub samples: ComplexBuffer,
    pub config: WaveformConfig,
    pub payload_bits: Vec<u8>,
    pub pilots: PilotPattern,
    /// Native symbol grid (see the module table).
    pub symbols: Grid,
}

impl Frame {
    pub fn pilot_mask(&self) -> &PilotMask {
        self.pilots.mask()
    }

    /// Transmit samples with every cyclic prefix removed.
    pub fn cp_stripped(&self) -> Vec<C64> {
        strip_cp(&self.samples, &self.config)
    }

    pub fn tf_grid(&self) -> Grid {
        native_to_tf(&self.symbols, &self.config)
    }
}

/// Number of payload bits a frame with this pilot mask carries.
pub fn payload_capacity(cfg: &WaveformConfig, mask: &PilotMask) -> usize {
    (cfg.grid_len() - mask.count()) * cfg.mod_order.bits_per_symbol()
}

/// Maps `bits` onto the data resource elements of the native grid (column by
/// column, subcarrier/delay index fastest), inserts the pilots, and runs the
/// kind's transmit chain.
pub fn modulate(bits: &[u8], pilots: &PilotPattern, cfg: &WaveformConfig) -> Result<Frame> {
    cfg.validate()?;
    pilots.check_for(cfg)?;
    let capacity = payload_capacity(cfg, pilots.mask());
    if bits.len() != capacity {
        return Err(Error::Length {
            what: "payload bits must fill every data resource element",
            expected: capacity,
            actual: bits.len(),
        });
    }
    let data = numerics::map_bits(bits, cfg.mod_order)?;
    let mut grid = cfg.empty_grid(cfg.kind.native_domain());
    let mut data_iter = data.into_iter();
    let mask = pilots.mask();
    for (i, z) in grid.as_mut_slice().iter_mut().enumerate() {
        *z = if mask.flags()[i] {
            pilots.values().as_slice()[i]
        } else {
            data_iter.next().expect("capacity checked above")
        };
    }
    let samples = modulate_grid(&grid, cfg)?;
    Ok(Frame {
        samples,
        config: *cfg,
        payload_bits: bits.to_vec(),
        pilots: pilots.clone(),
        symbols: grid,
    })
}

/// Frame with uniformly random payload bits.
pub fn random_frame(cfg: &WaveformConfig, pilots: &PilotPattern, rng: &mut SimRng) -> Result<Frame> {
    let bits = rng.bits(payload_capacity(cfg, pilots.mask()));
    modulate(&bits, pilots, cfg)
}

/// Runs the transmit chain on an already populated native grid.
pub fn modulate_grid(native: &Grid, cfg: &WaveformConfig) -> Result<ComplexBuffer> {
    cfg.validate()?;
    cfg.check_grid(native)?;
    let tf = native_to_tf(native, cfg);
    ComplexBuffer::new(ofdm_modulate(&tf, cfg))
}

/// Exact inverse of [`modulate_grid`]: returns the kind's native grid.
pub fn demodulate(samples: &[C64], cfg: &WaveformConfig) -> Result<Grid> {
    let tf = demodulate_tf(samples, cfg)?;
    Ok(tf_to_native(&tf, cfg))
}

/// CP removal and per-symbol `M`-point DFT.
pub fn demodulate_tf(samples: &[C64], cfg: &WaveformConfig) -> Result<Grid> {
    cfg.validate()?;
    if samples.len() != cfg.frame_len() {
        return Err(Error::Length {
            what: "frame samples",
            expected: cfg.frame_len(),
            actual: samples.len(),
        });
    }
    Ok(ofdm_demodulate(samples, cfg))
}

pub(crate) fn strip_cp(samples: &[C64], cfg: &WaveformConfig) -> Vec<C64> {
    let (m, cp) = (cfg.subcarriers, cfg.cp_len);
    samples
        .chunks_exact(m + cp)
        .flat_map(|sym| sym[cp..].iter().copied())
        .collect()
}

pub(crate) fn ofdm_modulate(tf: &Grid, cfg: &WaveformConfig) -> Vec<C64> {
    let (m, cp) = (cfg.subcarriers, cfg.cp_len);
    let mut out = Vec::with_capacity(cfg.frame_len());
    let mut body = vec![C64::default(); m];
    for n in 0..tf.cols() {
        body.copy_from_slice(tf.column(n));
        fft_in_place(&mut body, true);
        out.extend_from_slice(&body[m - cp..]);
        out.extend_from_slice(&body);
    }
    out
}

pub(crate) fn ofdm_demodulate(samples: &[C64], cfg: &WaveformConfig) -> Grid {
    let (m, cp) = (cfg.subcarriers, cfg.cp_len);
    let mut grid = cfg.empty_grid(Domain::TimeFrequency);
    for (n, sym) in samples.chunks_exact(m + cp).enumerate() {
        let col = grid.column_mut(n);
        col.copy_from_slice(&sym[cp..]);
        fft_in_place(col, false);
    }
    grid
}

/// Adjoint of [`ofdm_modulate`]: folds each prefix back onto the symbol tail
/// before the forward DFT.
pub(crate) fn ofdm_modulate_adjoint(samples: &[C64], cfg: &WaveformConfig) -> Grid {
    let (m, cp) = (cfg.subcarriers, cfg.cp_len);
    let mut grid = cfg.empty_grid(Domain::TimeFrequency);
    for (n, sym) in samples.chunks_exact(m + cp).enumerate() {
        let col = grid.column_mut(n);
        col.copy_from_slice(&sym[cp..]);
        for i in 0..cp {
            col[m - cp + i] += sym[i];
        }
        fft_in_place(col, false);
    }
    grid
}

/// Adjoint of [`ofdm_demodulate`]: inverse DFT per symbol with zeros in the
/// prefix positions.
pub(crate) fn ofdm_demodulate_adjoint(tf: &Grid, cfg: &WaveformConfig) -> Vec<C64> {
    let (m, cp) = (cfg.subcarriers, cfg.cp_len);
    let mut out = vec![C64::default(); cfg.frame_len()];
    let mut body = vec![C64::default(); m];
    for (n, sym) in out.chunks_exact_mut(m + cp).enumerate() {
        body.copy_from_slice(tf.column(n));
        fft_in_place(&mut body, true);
        sym[cp..].copy_from_slice(&body);
    }
    out
}

fn transform_columns(g: &mut Grid, inverse: bool) {
    for n in 0..g.cols() {
        fft_in_place(g.column_mut(n), inverse);
    }
}

fn transform_rows(g: &mut Grid, inverse: bool) {
    let (rows, cols) = (g.rows(), g.cols());
    let mut buf = vec![C64::default(); cols];
    for r in 0..rows {
        for (c, z) in buf.iter_mut().enumerate() {
            *z = g.get(r, c);
        }
        fft_in_place(&mut buf, inverse);
        for (c, z) in buf.iter().enumerate() {
            g.set(r, c, *z);
        }
    }
}

/// Inverse symplectic finite Fourier transform, delay-Doppler → time-frequency.
pub fn isfft(dd: &Grid) -> Grid {
    let mut g = dd.clone();
    transform_rows(&mut g, true);
    transform_columns(&mut g, false);
    g.set_domain(Domain::TimeFrequency);
    g
}

/// Symplectic finite Fourier transform, time-frequency → delay-Doppler.
pub fn sfft(tf: &Grid) -> Grid {
    let mut g = tf.clone();
    transform_columns(&mut g, true);
    transform_rows(&mut g, false);
    g.set_domain(Domain::DelayDoppler);
    g
}

/// `N`-point DFT along the Doppler axis of every delay row.
pub fn doppler_spread(dd: &Grid) -> Grid {
    let mut g = dd.clone();
    transform_rows(&mut g, false);
    g
}

pub fn doppler_despread(dd: &Grid) -> Grid {
    let mut g = dd.clone();
    transform_rows(&mut g, true);
    g
}

/// Carries a native grid onto the time-frequency grid.
pub fn native_to_tf(native: &Grid, cfg: &WaveformConfig) -> Grid {
    match cfg.kind {
        WaveformKind::Ofdm => native.clone(),
        WaveformKind::DftsOfdm => {
            let mut g = native.clone();
            transform_columns(&mut g, false);
            g
        }
        WaveformKind::Otfs => isfft(native),
        WaveformKind::DftsOtfs => isfft(&doppler_spread(native)),
    }
}

pub fn tf_to_native(tf: &Grid, cfg: &WaveformConfig) -> Grid {
    match cfg.kind {
        WaveformKind::Ofdm => tf.clone(),
        WaveformKind::DftsOfdm => {
            let mut g = tf.clone();
            transform_columns(&mut g, true);
            g
        }
        WaveformKind::Otfs => sfft(tf),
        WaveformKind::DftsOtfs => doppler_despread(&sfft(tf)),
    }
}

/// Grid in which the receiver equalizes: time-frequency for the OFDM
/// family, the precoded delay-Doppler grid for the OTFS family.
pub fn tf_to_equalizer_domain(tf: &Grid, cfg: &WaveformConfig) -> Grid {
    match cfg.kind {
        WaveformKind::Ofdm | WaveformKind::DftsOfdm => tf.clone(),
        WaveformKind::Otfs | WaveformKind::DftsOtfs => sfft(tf),
    }
}

pub fn equalizer_domain_to_tf(g: &Grid, cfg: &WaveformConfig) -> Grid {
    match cfg.kind {
        WaveformKind::Ofdm | WaveformKind::DftsOfdm => g.clone(),
        WaveformKind::Otfs | WaveformKind::DftsOtfs => isfft(g),
    }
}

/// Undoes whatever spreading separates the equalizer domain from the native
/// grid (the per-symbol DFT of DFT-s-OFDM, the Doppler-axis DFT of
/// DFT-s-OTFS).
pub fn equalizer_domain_to_native(g: &Grid, cfg: &WaveformConfig) -> Grid {
    match cfg.kind {
        WaveformKind::Ofdm | WaveformKind::Otfs => g.clone(),
        WaveformKind::DftsOfdm => {
            let mut out = g.clone();
            transform_columns(&mut out, true);
            out
        }
        WaveformKind::DftsOtfs => doppler_despread(g),
    }
}

#[cfg(test)]
mod tests;
