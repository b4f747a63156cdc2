//! Physical-layer simulation of four THz integrated sensing and communication
//! waveforms: OFDM, DFT-s-OFDM, OTFS and DFT-s-OTFS.
//!
//! Every chain runs end to end: bits are mapped onto a time-frequency or
//! delay-Doppler grid, modulated into a cyclic-prefixed frame, pushed through a
//! delay-Doppler channel with optional phase noise, PA compression and AWGN,
//! and then either equalized and detected (communication) or matched against
//! the known transmit signal to estimate range and velocity (monostatic
//! sensing). The [`experiment`] module drives Monte-Carlo sweeps that write
//! diff-stable CSV.
//!
//! All randomness flows through [`numerics::SimRng`], so a fixed seed
//! reproduces every result bit for bit.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod numerics;
pub mod rxcomm;
pub mod sensing;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
