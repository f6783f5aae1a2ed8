//! Streaming moment accumulators with associative merge.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

/// Accumulates count, complex sum, sum of |x|^2 and sum of |x|^4.
///
/// Merging two accumulators is equivalent to accumulating the
/// concatenated stream, so per-thread accumulators can be combined in
/// any grouping.
#[derive(Clone, Copy, Debug)]
pub struct MomentAccumulator<T> {
    count: u64,
    sum1: Cplx<T>,
    sum2: T,
    sum4: T,
}

impl<T: Scalar> Default for MomentAccumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Summary statistics extracted from a [`MomentAccumulator`].
#[derive(Clone, Copy, Debug)]
pub struct Moments<T> {
    pub mean: Cplx<T>,
    /// E[|x|^2]
    pub power: T,
    /// var(|x|^2) = E[|x|^4] - E[|x|^2]^2
    pub var_of_square: T,
    /// E[|x|^4]
    pub fourth: T,
    pub count: u64,
}

impl<T: Scalar> MomentAccumulator<T> {
    pub fn new() -> Self {
        Self {
            count: 0,
            sum1: Cplx::new(T::zero(), T::zero()),
            sum2: T::zero(),
            sum4: T::zero(),
        }
    }

    #[inline]
    pub fn push(&mut self, x: Cplx<T>) {
        self.count += 1;
        self.sum1 += x;
        let m2 = x.norm_sqr();
        self.sum2 += m2;
        self.sum4 += m2 * m2;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum1 += other.sum1;
        self.sum2 += other.sum2;
        self.sum4 += other.sum4;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn moments(&self) -> Result<Moments<T>> {
        if self.count < 2 {
            return Err(Error::InsufficientData { count: self.count });
        }
        let n = T::cast(self.count as f64);
        let power = self.sum2 / n;
        let fourth = self.sum4 / n;
        Ok(Moments {
            mean: self.sum1 / n,
            power,
            var_of_square: fourth - power * power,
            fourth,
            count: self.count,
        })
    }
}
