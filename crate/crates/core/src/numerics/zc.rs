use std::f64::consts::PI;

use super::ComplexBuffer;
use crate::{Error, Result, C64};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zadoff-Chu sequence of the given length and root.
///
/// Odd lengths use `e^{-jπ·u·n(n+1)/L}`. Even lengths (every power-of-two
/// grid in this crate) use the Frank-Chu form `e^{-jπ·u·n²/L}`, which keeps
/// the constant envelope, the flat spectrum and the ideal cyclic
/// autocorrelation. The root must be coprime to the length.
pub fn zadoff_chu(length: usize, root: i64) -> Result<ComplexBuffer> {
    if length == 0 {
        return Err(Error::param("Zadoff-Chu length must be positive"));
    }
    let l = length as u64;
    let u = root.rem_euclid(2 * l as i64) as u64;
    if gcd(root.unsigned_abs(), l) != 1 {
        return Err(Error::param(format!(
            "Zadoff-Chu root {root} is not coprime to length {length}"
        )));
    }
    let odd = l % 2 == 1;
    let period = 2 * l as u128;
    let data = (0..l)
        .map(|n| {
            let n = n as u128;
            let q = if odd { n * (n + 1) } else { n * n };
            // reduce the exponent exactly before going to floating point
            let k = (u as u128 * q) % period;
            C64::from_polar(1.0, -PI * k as f64 / l as f64)
        })
        .collect();
    Ok(ComplexBuffer::from_trusted(data))
}
