//! Radix-2 FFT, unitary in both directions.
//!
//! The simulator applies the channel per subcarrier, so the FFT only
//! appears in the time-domain validation path and in tests. A plain
//! iterative radix-2 kernel is all that is needed; lengths are powers
//! of two by construction everywhere in this crate.

use super::is_power_of_two;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

/// Unitary FFT (`inverse = false`) or IFFT (`inverse = true`).
///
/// Both directions scale by `1/sqrt(len)`, so signal power is preserved
/// and `fft(fft(x, false), true) == x`.
pub fn fft<T: Scalar>(x: &[Cplx<T>], inverse: bool) -> Result<Vec<Cplx<T>>> {
    let mut out = x.to_vec();
    fft_in_place(&mut out, inverse)?;
    Ok(out)
}

/// In-place variant of [`fft`].
pub fn fft_in_place<T: Scalar>(data: &mut [Cplx<T>], inverse: bool) -> Result<()> {
    let n = data.len();
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo {
            what: "fft input",
            len: n,
        });
    }
    if n == 1 {
        return Ok(());
    }

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    // Butterflies.
    let sign = if inverse { T::one() } else { -T::one() };
    let mut len = 2;
    while len <= n {
        let ang = sign * (T::PI() + T::PI()) / T::cast(len as f64);
        let wlen = Cplx::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Cplx::new(T::one(), T::zero());
            for k in 0..len / 2 {
                let a = data[start + k];
                let b = data[start + k + len / 2] * w;
                data[start + k] = a + b;
                data[start + k + len / 2] = a - b;
                w *= wlen;
            }
        }
        len <<= 1;
    }

    let scale = T::one() / T::cast(n as f64).sqrt();
    for v in data.iter_mut() {
        *v = v.scale(scale);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Streams;
    use rand::Rng;

    type C = Cplx<f64>;

    fn random_seq(n: usize, stream: u64) -> Vec<C> {
        let mut rng = Streams::new(0xf0f0).stream(stream);
        (0..n)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    /// O(n^2) DFT used as an independent oracle.
    fn dft_naive(x: &[C], inverse: bool) -> Vec<C> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|k| {
                let mut acc = C::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let ang = sign * 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                    acc += v * C::new(ang.cos(), ang.sin());
                }
                acc.scale(scale)
            })
            .collect()
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut x = vec![C::new(0.0, 0.0); 4];
        x[0] = C::new(1.0, 0.0);
        let y = fft(&x, false).unwrap();
        for v in &y {
            assert!((v - C::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_naive_dft() {
        let x = random_seq(64, 1);
        let fast = fft(&x, false).unwrap();
        let slow = dft_naive(&x, false);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        let fast_inv = fft(&x, true).unwrap();
        let slow_inv = dft_naive(&x, true);
        for (a, b) in fast_inv.iter().zip(&slow_inv) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip_512() {
        let x = random_seq(512, 2);
        let y = fft(&fft(&x, false).unwrap(), true).unwrap();
        let max = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-12, "round-trip error {max}");
    }

    #[test]
    fn parseval_holds() {
        let x = random_seq(512, 3);
        let y = fft(&x, false).unwrap();
        let px: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let py: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((px - py).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let x = vec![C::new(1.0, 0.0); 24];
        assert!(matches!(
            fft(&x, false),
            Err(Error::NotPowerOfTwo { len: 24, .. })
        ));
    }
}
