use std::f64::consts::FRAC_1_SQRT_2;

use super::ComplexBuffer;
use crate::{Error, Result, C64};

/// Square Gray-coded QAM order.
///
/// Bit-to-point tables (scaled to unit average energy):
///
/// * 4-QAM, bits `b0 b1`: `((1-2·b0) + j(1-2·b1)) / √2`, so `00 → (+1+j)/√2`
///   and `11 → (-1-j)/√2`.
/// * 16-QAM, bits `b0 b1 b2 b3`: `I = (1-2·b0)(2-(1-2·b2))`,
///   `Q = (1-2·b1)(2-(1-2·b3))`, scaled by `1/√10`. Per axis the levels
///   `+1, +3, -1, -3` carry `(b_sign, b_amp) = 00, 01, 10, 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModOrder {
    Qam4,
    Qam16,
}

const SCALE_16: f64 = 0.316_227_766_016_837_94; // 1/√10

impl ModOrder {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            4 => Ok(ModOrder::Qam4),
            16 => Ok(ModOrder::Qam16),
            other => Err(Error::param(format!(
                "unsupported modulation order {other} (expected 4 or 16)"
            ))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            ModOrder::Qam4 => 4,
            ModOrder::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModOrder::Qam4 => 2,
            ModOrder::Qam16 => 4,
        }
    }

    pub(crate) fn map_point(self, bits: &[u8]) -> C64 {
        let lvl = |b: u8| 1.0 - 2.0 * f64::from(b);
        match self {
            ModOrder::Qam4 => C64::new(lvl(bits[0]), lvl(bits[1])) * FRAC_1_SQRT_2,
            ModOrder::Qam16 => {
                let i = lvl(bits[0]) * (2.0 - lvl(bits[2]));
                let q = lvl(bits[1]) * (2.0 - lvl(bits[3]));
                C64::new(i, q) * SCALE_16
            }
        }
    }

    pub(crate) fn demap_point(self, z: C64, out: &mut Vec<u8>) {
        let sign = |v: f64| u8::from(v < 0.0);
        match self {
            ModOrder::Qam4 => {
                out.push(sign(z.re));
                out.push(sign(z.im));
            }
            ModOrder::Qam16 => {
                // decision boundary between inner and outer levels sits at 2/√10
                let edge = 2.0 * SCALE_16;
                out.push(sign(z.re));
                out.push(sign(z.im));
                out.push(u8::from(z.re.abs() > edge));
                out.push(u8::from(z.im.abs() > edge));
            }
        }
    }

    pub fn constellation(self) -> Vec<C64> {
        let k = self.bits_per_symbol();
        (0..self.order() as usize)
            .map(|v| {
                let bits: Vec<u8> = (0..k).map(|i| ((v >> (k - 1 - i)) & 1) as u8).collect();
                self.map_point(&bits)
            })
            .collect()
    }
}

pub(crate) fn map_bits(bits: &[u8], order: ModOrder) -> Result<Vec<C64>> {
    let k = order.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::Length {
            what: "bit count must be a multiple of bits per symbol",
            expected: bits.len().next_multiple_of(k),
            actual: bits.len(),
        });
    }
    if let Some(i) = bits.iter().position(|&b| b > 1) {
        return Err(Error::param(format!("bit {i} has value {} (expected 0 or 1)", bits[i])));
    }
    Ok(bits.chunks_exact(k).map(|c| order.map_point(c)).collect())
}

pub fn qam_map(bits: &[u8], order: ModOrder) -> Result<ComplexBuffer> {
    ComplexBuffer::new(map_bits(bits, order)?)
}

/// Hard minimum-distance decision. Square Gray QAM separates per axis, so
/// slicing I and Q independently is the exact nearest-point rule.
pub fn qam_demap(symbols: &[C64], order: ModOrder) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * order.bits_per_symbol());
    for &z in symbols {
        order.demap_point(z, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;
    use proptest::prelude::*;

    #[test]
    fn documented_qpsk_points() {
        let s = qam_map(&[0, 0, 1, 1], ModOrder::Qam4).unwrap();
        assert!((s[0] - C64::new(1.0, 1.0) * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((s[1] - C64::new(-1.0, -1.0) * FRAC_1_SQRT_2).norm() < 1e-15);
    }

    #[test]
    fn unit_average_energy() {
        for order in [ModOrder::Qam4, ModOrder::Qam16] {
            let pts = order.constellation();
            let e: f64 = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((e - 1.0).abs() < 1e-15, "{order:?}: {e}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let order = ModOrder::Qam16;
        let pts = order.constellation();
        let d_min = 2.0 * SCALE_16;
        for (a, pa) in pts.iter().enumerate() {
            for (b, pb) in pts.iter().enumerate() {
                if ((pa - pb).norm() - d_min).abs() < 1e-12 {
                    assert_eq!((a ^ b).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn nearest_point_decision() {
        let z = C64::new(0.9, 1.1) * FRAC_1_SQRT_2;
        assert_eq!(qam_demap(&[z], ModOrder::Qam4), vec![0, 0]);
    }

    #[test]
    fn indivisible_bits_rejected() {
        assert!(matches!(qam_map(&[0, 1, 1], ModOrder::Qam4), Err(Error::Length { .. })));
        assert!(matches!(qam_map(&[0, 1, 1, 0, 1, 1], ModOrder::Qam16), Err(Error::Length { .. })));
        assert!(qam_map(&[0, 2], ModOrder::Qam4).is_err());
    }

    #[test]
    fn awgn_ber_at_20db_is_small() {
        let mut rng = SimRng::new(1);
        let bits = rng.bits(20_000);
        let sym = qam_map(&bits, ModOrder::Qam4).unwrap();
        let nv = 10f64.powf(-2.0);
        let rx: Vec<C64> = sym.iter().map(|s| s + rng.complex_gaussian(nv)).collect();
        let back = qam_demap(&rx, ModOrder::Qam4);
        let errors = bits.iter().zip(&back).filter(|(a, b)| a != b).count();
        // Q(√SNR) at 20 dB is ~1e-23: the bound leaves ample margin.
        assert!((errors as f64) / (bits.len() as f64) < 1e-3);
    }

    proptest! {
        #[test]
        fn round_trip(bits in prop::collection::vec(0u8..2, 1..=4096usize), wide in any::<bool>()) {
            let order = if wide { ModOrder::Qam16 } else { ModOrder::Qam4 };
            let k = order.bits_per_symbol();
            let bits = &bits[..bits.len() / k * k];
            prop_assume!(!bits.is_empty());
            let sym = qam_map(bits, order).unwrap();
            prop_assert_eq!(qam_demap(&sym, order), bits.to_vec());
        }
    }

    #[test]
    fn exhaustive_round_trip_to_64k_bits() {
        let mut rng = SimRng::new(99);
        let bits = rng.bits(1 << 16);
        for order in [ModOrder::Qam4, ModOrder::Qam16] {
            let sym = qam_map(&bits, order).unwrap();
            assert_eq!(qam_demap(&sym, order), bits);
        }
    }
}
