//! Sample buffers, unitary transforms, QAM mapping, Zadoff-Chu sequences and
//! the seeded random source shared by every other module.

mod fft;
mod qam;
mod rng;
mod zc;

pub use fft::{fft, fft_any, fft_in_place, signed_bin};
pub use qam::{qam_demap, qam_map, ModOrder};
pub(crate) use qam::map_bits;
pub use rng::SimRng;
pub use zc::zadoff_chu;

use crate::{Error, Result, C64};

/// A non-empty run of finite complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBuffer(Vec<C64>);

impl ComplexBuffer {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Sizing("buffer must hold at least one sample".into()));
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} is {}", data[i])));
        }
        Ok(Self(data))
    }

    /// Wraps samples produced by an internal chain that cannot introduce
    /// non-finite values. Still checked in debug builds.
    pub(crate) fn from_trusted(data: Vec<C64>) -> Self {
        debug_assert!(!data.is_empty());
        debug_assert!(data.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(data)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn energy(&self) -> f64 {
        energy(&self.0)
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.len() as f64
    }
}

impl std::ops::Deref for ComplexBuffer {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl TryFrom<Vec<C64>> for ComplexBuffer {
    type Error = Error;

    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

pub fn energy(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `Σ a_k · conj(b_k)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
