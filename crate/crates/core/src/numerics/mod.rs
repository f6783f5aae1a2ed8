//! Deterministic numerical kernels shared by the rest of the crate:
//! unitary FFT, fast Walsh-Hadamard transform, seeded complex Gaussian
//! generation and streaming moment accumulators.

pub mod fft;
pub mod fwht;
pub mod moments;
pub mod rng;

pub use fft::{fft, fft_in_place};
pub use fwht::{fwht, fwht_in_place};
pub use moments::{MomentAccumulator, Moments};
pub use rng::{gaussian_complex, ComplexNormal, SimRng, Streams};

/// True when `n` is a nonzero power of two.
#[inline]
pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
