use super::{Domain, Grid, WaveformConfig, WaveformKind};
use crate::numerics::{fft_in_place, zadoff_chu};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PilotScheme {
    None,
    /// Pilots on every `freq_spacing`-th row and `time_spacing`-th column,
    /// starting at the origin. Overhead `1/(freq_spacing·time_spacing)`.
    Scattered { freq_spacing: usize, time_spacing: usize },
    /// The first symbol of the frame is a full Zadoff-Chu pilot symbol.
    /// Overhead `1/N`.
    DedicatedSymbol,
}

/// Per resource element pilot flags, laid out like [`Grid`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotMask {
    rows: usize,
    cols: usize,
    flags: Vec<bool>,
}

impl PilotMask {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            flags: vec![false; rows * cols],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            flags: vec![true; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut flags = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                flags.push(f(r, c));
            }
        }
        Self { rows, cols, flags }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_pilot(&self, row: usize, col: usize) -> bool {
        self.flags[col * self.rows + row]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Fraction of resource elements spent on pilots.
    pub fn overhead(&self) -> f64 {
        self.count() as f64 / self.flags.len() as f64
    }
}

/// Builds the pilot mask of `scheme` for `cfg`, checking that the scheme
/// suits the waveform.
///
/// Dedicated pilot symbols need an OFDM symbol to occupy, so they are only
/// offered for OFDM and DFT-s-OFDM. Scattered pilots would break the single
/// carrier structure of the DFT-spread kinds and are only offered for OFDM
/// (time-frequency grid) and OTFS (delay-Doppler grid).
pub fn resource_map(cfg: &WaveformConfig, scheme: PilotScheme) -> Result<PilotMask> {
    cfg.validate()?;
    let (m, n) = (cfg.subcarriers, cfg.symbols);
    let mismatch = || {
        Error::param(format!(
            "pilot scheme {scheme:?} is not available for {}",
            cfg.kind
        ))
    };
    match scheme {
        PilotScheme::None => Ok(PilotMask::empty(m, n)),
        PilotScheme::DedicatedSymbol => match cfg.kind {
            WaveformKind::Ofdm | WaveformKind::DftsOfdm => Ok(PilotMask::from_fn(m, n, |_, c| c == 0)),
            _ => Err(mismatch()),
        },
        PilotScheme::Scattered {
            freq_spacing,
            time_spacing,
        } => {
            if !matches!(cfg.kind, WaveformKind::Ofdm | WaveformKind::Otfs) {
                return Err(mismatch());
            }
            if freq_spacing == 0 || time_spacing == 0 || m % freq_spacing != 0 || n % time_spacing != 0 {
                return Err(Error::param(format!(
                    "pilot spacing {freq_spacing}x{time_spacing} must divide the {m}x{n} grid"
                )));
            }
            Ok(PilotMask::from_fn(m, n, |r, c| {
                r % freq_spacing == 0 && c % time_spacing == 0
            }))
        }
    }
}

/// Pilot positions plus their values, both on the native grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotPattern {
    scheme: PilotScheme,
    mask: PilotMask,
    values: Grid,
}

impl PilotPattern {
    /// Pilot values are a root-1 Zadoff-Chu sequence laid along the pilot
    /// positions in grid order. For DFT-s-OFDM the dedicated symbol is placed
    /// before the DFT spread, so it is constant-envelope in time and, being a
    /// Chu sequence, flat in frequency too.
    pub fn new(cfg: &WaveformConfig, scheme: PilotScheme) -> Result<Self> {
        let mask = resource_map(cfg, scheme)?;
        let mut values = cfg.empty_grid(cfg.kind.native_domain());
        let count = mask.count();
        if count > 0 {
            let seq = match scheme {
                PilotScheme::DedicatedSymbol => zadoff_chu(cfg.subcarriers, 1)?,
                _ => zadoff_chu(count, 1)?,
            };
            let mut it = seq.iter();
            for (slot, &flag) in values.as_mut_slice().iter_mut().zip(mask.flags()) {
                if flag {
                    *slot = *it.next().expect("sequence covers every pilot");
                }
            }
        }
        Ok(Self { scheme, mask, values })
    }

    pub fn none(cfg: &WaveformConfig) -> Self {
        Self {
            scheme: PilotScheme::None,
            mask: PilotMask::empty(cfg.subcarriers, cfg.symbols),
            values: cfg.empty_grid(cfg.kind.native_domain()),
        }
    }

    pub fn scheme(&self) -> PilotScheme {
        self.scheme
    }

    pub fn mask(&self) -> &PilotMask {
        &self.mask
    }

    /// Native-grid values; zero off the mask.
    pub fn values(&self) -> &Grid {
        &self.values
    }

    pub(crate) fn check_for(&self, cfg: &WaveformConfig) -> Result<()> {
        if self.mask.rows() != cfg.subcarriers || self.mask.cols() != cfg.symbols {
            return Err(Error::Dimension {
                expected_rows: cfg.subcarriers,
                expected_cols: cfg.symbols,
                rows: self.mask.rows(),
                cols: self.mask.cols(),
            });
        }
        Ok(())
    }

    /// Pilot positions and values as seen on the time-frequency grid, which
    /// is where the sensing receiver divides them out.
    pub fn tf_reference(&self, cfg: &WaveformConfig) -> Result<(PilotMask, Grid)> {
        self.check_for(cfg)?;
        match cfg.kind {
            WaveformKind::Ofdm => Ok((self.mask.clone(), self.values.clone())),
            WaveformKind::DftsOfdm => {
                // only whole pilot columns survive the per-symbol DFT intact
                let mut values = self.values.clone();
                values.set_domain(Domain::TimeFrequency);
                for c in 0..cfg.symbols {
                    let flagged = (0..cfg.subcarriers).filter(|&r| self.mask.is_pilot(r, c)).count();
                    if flagged == 0 {
                        continue;
                    }
                    if flagged != cfg.subcarriers {
                        return Err(Error::precondition(
                            "DFT-s-OFDM pilots must occupy whole symbols",
                        ));
                    }
                    fft_in_place(values.column_mut(c), false);
                }
                Ok((self.mask.clone(), values))
            }
            WaveformKind::Otfs | WaveformKind::DftsOtfs => {
                if self.mask.is_empty() {
                    Ok((self.mask.clone(), Grid::zeros(cfg.subcarriers, cfg.symbols, Domain::TimeFrequency)))
                } else {
                    Err(Error::precondition(
                        "delay-Doppler pilots have no time-frequency reference",
                    ))
                }
            }
        }
    }
}
