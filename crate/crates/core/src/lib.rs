//! Link-level simulator and analytical toolkit for Hadamard-precoded
//! OFDM over time-variant frequency-selective Rayleigh channels.
//!
//! The transmit chain spreads each block of QPSK symbols with an
//! orthonormal Walsh-Hadamard matrix, interleaves the block across
//! subcarriers and symbol periods, and recovers it through a clipped
//! zero-forcing equalizer and the inverse transform. Monte-Carlo
//! experiments ([`harness`]) are cross-checked against closed-form and
//! quadrature predictions ([`analysis`]) of the same quantities.
//!
//! All numerics are generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the aliases below fix the production precision.

pub mod analysis;
pub mod chain;
pub mod channel;
pub mod equalizer;
pub mod error;
pub mod harness;
pub mod interleaver;
pub mod numerics;
pub mod precoder;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Scalar};

/// Complex sample at single precision.
pub type C32 = Cplx<f32>;
/// Complex sample at double precision (the production type).
pub type C64 = Cplx<f64>;
/// Production-precision OFDM frame.
pub type Grid64 = interleaver::OfdmGrid<f64>;
/// Production-precision channel realization.
pub type Channel64 = channel::ChannelRealization<f64>;
/// Production-precision link.
pub type Link64 = chain::Link<f64>;
