//! Seeded, splittable random number generation.
//!
//! ChaCha8 is counter based: the same `(master_seed, stream_id)` pair
//! always produces the same sequence, and distinct stream ids give
//! independent streams. Trials pull their own streams so experiments
//! are reproducible no matter how work is scheduled across threads.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Factory for independent random streams under one master seed.
#[derive(Clone, Copy, Debug)]
pub struct Streams {
    master_seed: u64,
}

impl Streams {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// The `stream_id`-th independent stream.
    pub fn stream(&self, stream_id: u64) -> SimRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.master_seed);
        inner.set_stream(stream_id);
        SimRng { inner, stream_id }
    }
}

/// One reproducible random stream.
#[derive(Clone, Debug)]
pub struct SimRng {
    inner: ChaCha8Rng,
    stream_id: u64,
}

impl SimRng {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for SimRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    #[inline]
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
    #[inline]
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Validated sampler for circularly symmetric complex Gaussians.
///
/// Real and imaginary parts are independent, each with variance
/// `variance / 2`, so `E[|x|^2] = variance`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexNormal<T> {
    per_dim_std: T,
}

impl<T: Scalar> ComplexNormal<T> {
    pub fn new(variance: T) -> Result<Self> {
        if !variance.is_finite() || variance <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "variance",
                reason: format!("must be positive and finite, got {variance}"),
            });
        }
        Ok(Self {
            per_dim_std: (variance / T::cast(2.0)).sqrt(),
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Cplx<T> {
        Cplx::new(
            T::standard_normal(rng) * self.per_dim_std,
            T::standard_normal(rng) * self.per_dim_std,
        )
    }
}

/// Single draw of a circularly symmetric complex Gaussian.
pub fn gaussian_complex<T: Scalar, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Result<Cplx<T>> {
    Ok(ComplexNormal::new(variance)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_is_bit_identical() {
        let mut a = Streams::new(42).stream(3);
        let mut b = Streams::new(42).stream(3);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = Streams::new(42).stream(0);
        let mut b = Streams::new(42).stream(1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn rejects_non_positive_variance() {
        let mut rng = Streams::new(1).stream(0);
        assert!(gaussian_complex::<f64, _>(&mut rng, 0.0).is_err());
        assert!(gaussian_complex::<f64, _>(&mut rng, -1.0).is_err());
    }

    #[test]
    fn moments_match_circular_gaussian() {
        // E[x] ~ 0, E|x|^2 ~ 1, E|x|^4 ~ 2 over 1e6 draws.
        let mut rng = Streams::new(2024).stream(0);
        let dist = ComplexNormal::<f64>::new(1.0).unwrap();
        let n = 1_000_000usize;
        let mut sum = Cplx::new(0.0, 0.0);
        let mut p2 = 0.0;
        let mut p4 = 0.0;
        for _ in 0..n {
            let x = dist.sample(&mut rng);
            sum += x;
            let m2 = x.norm_sqr();
            p2 += m2;
            p4 += m2 * m2;
        }
        let mean = sum / n as f64;
        assert!(mean.norm() < 0.005, "mean {mean}");
        let e2 = p2 / n as f64;
        assert!((e2 - 1.0).abs() < 0.01, "E|x|^2 = {e2}");
        let e4 = p4 / n as f64;
        assert!((e4 - 2.0).abs() < 0.04, "E|x|^4 = {e4}");
    }
}
