use std::cell::RefCell;

use rustfft::{FftDirection, FftPlanner};

use super::{is_power_of_two, ComplexBuffer};
use crate::{Error, Result, C64};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unitary DFT of a power-of-two buffer.
///
/// Forward: `X_k = L^{-1/2} Σ_n x_n e^{-j2πkn/L}`; inverse uses `e^{+j…}` with
/// the same scale, so `fft(fft(x, false), true) == x` and energy is preserved.
pub fn fft(x: &ComplexBuffer, inverse: bool) -> Result<ComplexBuffer> {
    if !is_power_of_two(x.len()) {
        return Err(Error::Sizing(format!(
            "FFT length {} is not a power of two",
            x.len()
        )));
    }
    Ok(ComplexBuffer::from_trusted(fft_any(x, inverse)))
}

/// Unitary DFT of any non-empty length. Used internally where frame lengths
/// include a cyclic prefix and are therefore not powers of two.
pub fn fft_any(x: &[C64], inverse: bool) -> Vec<C64> {
    let mut out = x.to_vec();
    fft_in_place(&mut out, inverse);
    out
}

pub fn fft_in_place(data: &mut [C64], inverse: bool) {
    let len = data.len();
    if len == 0 {
        return;
    }
    let dir = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir));
    plan.process(data);
    let scale = 1.0 / (len as f64).sqrt();
    for z in data.iter_mut() {
        *z *= scale;
    }
}

/// Signed index of DFT bin `k` out of `len`: `k` below `len/2`, `k - len`
/// from `len/2` upwards (the Nyquist bin counts as negative).
pub fn signed_bin(k: usize, len: usize) -> f64 {
    if k < len / 2 + len % 2 {
        k as f64
    } else {
        k as f64 - len as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{energy, SimRng};
    use std::f64::consts::PI;

    fn brute_dft(x: &[C64], inverse: bool) -> Vec<C64> {
        let l = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..l)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(n, v)| v * C64::from_polar(1.0, sign * 2.0 * PI * (k * n) as f64 / l as f64))
                    .sum::<C64>()
                    / (l as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn impulse_is_flat() {
        let x = ComplexBuffer::new(vec![C64::new(1.0, 0.0), C64::default(), C64::default(), C64::default()]).unwrap();
        let y = fft(&x, false).unwrap();
        for z in y.iter() {
            assert!((z - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        let x = ComplexBuffer::new(vec![C64::new(1.0, 0.0); 12]).unwrap();
        assert!(matches!(fft(&x, false), Err(Error::Sizing(_))));
    }

    #[test]
    fn matches_brute_force_dft() {
        let mut rng = SimRng::new(11);
        let x: Vec<C64> = (0..16).map(|_| rng.complex_gaussian(1.0)).collect();
        let buf = ComplexBuffer::new(x.clone()).unwrap();
        for inverse in [false, true] {
            let fast = fft(&buf, inverse).unwrap();
            let slow = brute_dft(&x, inverse);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_restores_input_and_energy() {
        let mut rng = SimRng::new(5);
        for len in [1usize, 2, 8, 64, 1024] {
            let x: Vec<C64> = (0..len).map(|_| rng.complex_gaussian(2.0)).collect();
            let buf = ComplexBuffer::new(x.clone()).unwrap();
            let y = fft(&buf, false).unwrap();
            let back = fft(&y, true).unwrap();
            let e = energy(&x);
            assert!((energy(&y) - e).abs() <= 1e-10 * e);
            let err: f64 = back.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err.sqrt() <= 1e-12 * e.sqrt());
        }
    }

    #[test]
    fn signed_bins() {
        assert_eq!(signed_bin(0, 8), 0.0);
        assert_eq!(signed_bin(3, 8), 3.0);
        assert_eq!(signed_bin(4, 8), -4.0);
        assert_eq!(signed_bin(7, 8), -1.0);
        assert_eq!(signed_bin(2, 5), 2.0);
        assert_eq!(signed_bin(3, 5), -2.0);
    }
}
