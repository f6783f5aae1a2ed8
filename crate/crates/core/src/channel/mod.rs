//! Time-variant frequency-selective Rayleigh fading and AWGN.
//!
//! Tap gains evolve by a sum-of-sinusoids Jakes model (random oscillator
//! angles and phases per realization, so ensemble autocorrelation is
//! exactly `J0(2 pi fd tau)`), held constant within one OFDM symbol
//! period. The per-cell response is
//! `H[k, t] = sum_l a_l(t) exp(-j 2 pi k delta_f tau_l)` with the exact
//! (unquantized) tap delays, and the channel acts multiplicatively per
//! cell; a quantized time-domain convolution path exists for validation.

pub mod profile;

pub use profile::{Tap, TapProfile};

use crate::error::{Error, Result};
use crate::interleaver::OfdmGrid;
use crate::numerics::fft_in_place;
use crate::numerics::rng::{ComplexNormal, SimRng};
use crate::scalar::{Cplx, Scalar};
use rand::Rng;

/// Oscillators per tap in the sum-of-sinusoids fading generator.
const JAKES_OSCILLATORS: usize = 64;

/// One channel realization over an `s` by `t` grid.
#[derive(Clone, Debug)]
pub struct ChannelRealization<T> {
    s: usize,
    t: usize,
    /// Per-cell response, indexed `[t * s + f]`.
    h: Vec<Cplx<T>>,
    /// Noisy estimate, present after [`ChannelRealization::with_estimate`].
    h_est: Option<Vec<Cplx<T>>>,
    /// Per-tap gain trajectories, indexed `[tap][t]`.
    tap_gains: Vec<Vec<Cplx<T>>>,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Draw a fading realization for the given profile and Doppler.
    pub fn realize(
        prof: &TapProfile,
        fd_hz: f64,
        s: usize,
        t: usize,
        delta_f_hz: f64,
        t_sym_s: f64,
        rng: &mut SimRng,
    ) -> Result<Self> {
        if fd_hz < 0.0 {
            return Err(Error::InvalidParameter {
                name: "fd",
                reason: format!("Doppler must be >= 0, got {fd_hz}"),
            });
        }
        if delta_f_hz <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta_f",
                reason: format!("subcarrier spacing must be > 0, got {delta_f_hz}"),
            });
        }
        if s == 0 || t == 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("empty grid {s}x{t}"),
            });
        }

        let tap_gains = jakes_gains(prof, fd_hz, t, t_sym_s, rng);

        // Subcarrier twiddles per tap: exp(-j 2 pi k delta_f tau_l).
        let twiddles: Vec<Vec<Cplx<T>>> = prof
            .taps()
            .iter()
            .map(|tap| {
                let rate = -2.0 * std::f64::consts::PI * delta_f_hz * tap.delay_ns * 1e-9;
                (0..s)
                    .map(|k| {
                        let ang = rate * k as f64;
                        Cplx::new(T::cast(ang.cos()), T::cast(ang.sin()))
                    })
                    .collect()
            })
            .collect();

        let mut h = vec![Cplx::new(T::zero(), T::zero()); s * t];
        for ti in 0..t {
            let row = &mut h[ti * s..(ti + 1) * s];
            for (tap_idx, tw) in twiddles.iter().enumerate() {
                let a = tap_gains[tap_idx][ti];
                for (cell, w) in row.iter_mut().zip(tw) {
                    *cell += a * w;
                }
            }
        }

        Ok(Self {
            s,
            t,
            h,
            h_est: None,
            tap_gains,
        })
    }

    /// Static unity channel (`H = 1` everywhere).
    pub fn unity(s: usize, t: usize) -> Self {
        Self {
            s,
            t,
            h: vec![Cplx::new(T::one(), T::zero()); s * t],
            h_est: None,
            tap_gains: Vec::new(),
        }
    }

    /// Independent unit-power Rayleigh fading per cell. A synthetic
    /// reference channel: no delay or Doppler structure at all.
    pub fn iid_rayleigh(s: usize, t: usize, rng: &mut SimRng) -> Self {
        let dist = ComplexNormal::new(T::one()).expect("unit variance");
        Self {
            s,
            t,
            h: (0..s * t).map(|_| dist.sample(rng)).collect(),
            h_est: None,
            tap_gains: Vec::new(),
        }
    }

    /// Attach a noisy channel estimate `H + eps`, `E[|eps|^2] = err_power`.
    pub fn with_estimate(mut self, err_power: f64, rng: &mut SimRng) -> Result<Self> {
        if err_power < 0.0 {
            return Err(Error::InvalidParameter {
                name: "err_power",
                reason: format!("must be >= 0, got {err_power}"),
            });
        }
        let est = if err_power == 0.0 {
            self.h.clone()
        } else {
            let dist = ComplexNormal::new(T::cast(err_power))?;
            self.h.iter().map(|&h| h + dist.sample(rng)).collect()
        };
        self.h_est = Some(est);
        Ok(self)
    }

    pub fn subcarriers(&self) -> usize {
        self.s
    }

    pub fn periods(&self) -> usize {
        self.t
    }

    pub fn h(&self) -> &[Cplx<T>] {
        &self.h
    }

    pub fn h_est(&self) -> Option<&[Cplx<T>]> {
        self.h_est.as_deref()
    }

    /// Gains used by the equalizer: the estimate when present.
    pub fn h_for_equalizer(&self, use_estimate: bool) -> &[Cplx<T>] {
        if use_estimate {
            self.h_est.as_deref().unwrap_or(&self.h)
        } else {
            &self.h
        }
    }

    pub fn tap_gains(&self) -> &[Vec<Cplx<T>>] {
        &self.tap_gains
    }

    #[inline]
    pub fn cell(&self, f: usize, t: usize) -> Cplx<T> {
        self.h[t * self.s + f]
    }
}

/// Sum-of-sinusoids tap gain trajectories, one column per symbol period.
fn jakes_gains<T: Scalar>(
    prof: &TapProfile,
    fd_hz: f64,
    t: usize,
    t_sym_s: f64,
    rng: &mut SimRng,
) -> Vec<Vec<Cplx<T>>> {
    let m = JAKES_OSCILLATORS;
    let amp = |p: f64| T::cast((p / m as f64).sqrt());
    prof.taps()
        .iter()
        .map(|tap| {
            // Random arrival angles set each oscillator's Doppler shift;
            // random phases decorrelate taps and realizations.
            let mut phasor: Vec<Cplx<T>> = Vec::with_capacity(m);
            let mut step: Vec<Cplx<T>> = Vec::with_capacity(m);
            for _ in 0..m {
                let alpha: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                let phi: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                let omega = 2.0 * std::f64::consts::PI * fd_hz * alpha.cos() * t_sym_s;
                phasor.push(Cplx::new(T::cast(phi.cos()), T::cast(phi.sin())));
                step.push(Cplx::new(T::cast(omega.cos()), T::cast(omega.sin())));
            }
            let a = amp(tap.power_lin);
            (0..t)
                .map(|_| {
                    let mut acc = Cplx::new(T::zero(), T::zero());
                    for (p, s) in phasor.iter_mut().zip(&step) {
                        acc += *p;
                        *p *= *s;
                    }
                    acc.scale(a)
                })
                .collect()
        })
        .collect()
}

/// `r = H x + n` with noise variance `sigma_n^2 = P_s / 10^(snr_db/10)`
/// for unit-power constellations (`P_s = 1`). An infinite SNR disables
/// the noise term.
pub fn apply<T: Scalar>(
    grid: &OfdmGrid<T>,
    ch: &ChannelRealization<T>,
    snr_db: T,
    rng: &mut SimRng,
) -> Result<OfdmGrid<T>> {
    let sigma_n2 = sigma_n2_from_snr_db(snr_db);
    let mut rx = apply_fading(grid, ch)?;
    if let Some(var) = sigma_n2 {
        let dist = ComplexNormal::new(var)?;
        for cell in rx.cells_mut() {
            *cell += dist.sample(rng);
        }
    }
    Ok(rx)
}

/// Noise variance implied by an SNR in dB; `None` disables noise.
pub fn sigma_n2_from_snr_db<T: Scalar>(snr_db: T) -> Option<T> {
    if snr_db.is_infinite() && snr_db > T::zero() {
        None
    } else {
        Some(T::cast(10.0).powf(-snr_db / T::cast(10.0)))
    }
}

/// Per-cell multiplication by the channel response.
pub fn apply_fading<T: Scalar>(
    grid: &OfdmGrid<T>,
    ch: &ChannelRealization<T>,
) -> Result<OfdmGrid<T>> {
    if grid.subcarriers() != ch.subcarriers() || grid.periods() != ch.periods() {
        return Err(Error::SizeMismatch {
            what: "channel grid",
            expected: ch.subcarriers() * ch.periods(),
            got: grid.len(),
        });
    }
    let cells = grid
        .cells()
        .iter()
        .zip(ch.h())
        .map(|(&x, &h)| h * x)
        .collect();
    OfdmGrid::from_cells(grid.subcarriers(), grid.periods(), cells)
}

/// Static taps quantized to the sampling grid, for the time-domain
/// validation path: delays become whole samples at rate `bw_hz`.
pub fn quantize_taps<T: Scalar>(
    prof: &TapProfile,
    gains: &[Cplx<T>],
    bw_hz: f64,
) -> Vec<(usize, Cplx<T>)> {
    prof.taps()
        .iter()
        .zip(gains)
        .map(|(tap, &g)| ((tap.delay_ns * 1e-9 * bw_hz).round() as usize, g))
        .collect()
}

/// Frequency response of quantized static taps on an `s`-point grid
/// with `delta_f = bw / s`.
pub fn quantized_freq_response<T: Scalar>(taps: &[(usize, Cplx<T>)], s: usize) -> Vec<Cplx<T>> {
    (0..s)
        .map(|k| {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for &(d, g) in taps {
                let ang = -2.0 * std::f64::consts::PI * (k * d % s) as f64 / s as f64;
                acc += g * Cplx::new(T::cast(ang.cos()), T::cast(ang.sin()));
            }
            acc
        })
        .collect()
}

/// Pass one frequency-domain OFDM symbol through the time domain:
/// unitary IFFT, cyclic prefix, tapped-delay-line convolution, prefix
/// removal, unitary FFT. With `cp_len` at least the longest tap delay
/// this equals per-subcarrier multiplication by the quantized response.
pub fn apply_time_domain<T: Scalar>(
    freq_symbol: &[Cplx<T>],
    taps: &[(usize, Cplx<T>)],
    cp_len: usize,
) -> Result<Vec<Cplx<T>>> {
    let s = freq_symbol.len();
    let max_delay = taps.iter().map(|&(d, _)| d).max().unwrap_or(0);
    if cp_len < max_delay {
        return Err(Error::InvalidParameter {
            name: "cp_len",
            reason: format!("cyclic prefix {cp_len} shorter than max tap delay {max_delay}"),
        });
    }

    let mut time = freq_symbol.to_vec();
    fft_in_place(&mut time, true)?;

    // CP extension followed by linear convolution with the taps.
    let mut extended = Vec::with_capacity(s + cp_len);
    extended.extend_from_slice(&time[s - cp_len..]);
    extended.extend_from_slice(&time);
    let mut conv = vec![Cplx::new(T::zero(), T::zero()); s + cp_len];
    for &(d, g) in taps {
        for i in d..s + cp_len {
            conv[i] += g * extended[i - d];
        }
    }

    let mut out = conv[cp_len..].to_vec();
    fft_in_place(&mut out, false)?;
    Ok(out)
}
