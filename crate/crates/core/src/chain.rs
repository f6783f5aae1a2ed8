//! End-to-end transmit/receive pipeline for one frame or trial:
//! bits -> QPSK -> Hadamard precode -> interleave -> fading channel with
//! AWGN -> clipped-ZF equalize -> deinterleave -> deprecode -> hard
//! decisions -> bit-error count.
//!
//! The IFFT/cyclic-prefix stage is represented analytically: the channel
//! acts per subcarrier and the FFT is unitary, so round-tripping through
//! the time domain is a no-op on the frequency-domain cells (the channel
//! module carries a time-domain validation path). Trials are pure
//! functions of `(master_seed, trial_index)`.

use crate::channel::{apply_fading, sigma_n2_from_snr_db, ChannelRealization, TapProfile};
use crate::equalizer::{gain, EqualizerProfile};
use crate::error::{Error, Result};
use crate::interleaver::{deinterleave_flat, interleave_flat, GridMap, OfdmGrid};
use crate::numerics::rng::{ComplexNormal, Streams};
use crate::numerics::{fwht_in_place, MomentAccumulator};
use crate::scalar::{Cplx, Scalar};
use rand::RngCore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    /// Hadamard precoding with time-frequency interleaving.
    Precoded,
    /// Plain OFDM (block size one).
    Uncoded,
    /// Precoder block = carrier count, mapped to consecutive carriers.
    OfdmCdm,
}

impl ChainMode {
    pub fn name(self) -> &'static str {
        match self {
            ChainMode::Precoded => "precoded",
            ChainMode::Uncoded => "uncoded",
            ChainMode::OfdmCdm => "ofdm-cdm",
        }
    }
}

/// Channel selection for a link.
#[derive(Clone, Debug)]
pub enum ChannelSpec {
    /// Tapped-delay-line Rayleigh fading with Jakes Doppler.
    Tdl(TapProfile),
    /// `H = 1` everywhere (AWGN reference).
    Unity,
    /// Independent Rayleigh draw per cell (closed-form reference).
    IidRayleigh,
}

/// Full configuration of one simulated link.
#[derive(Clone, Debug)]
pub struct LinkConfig {
    pub s: usize,
    /// Symbol periods per frame; 0 picks the smallest tiling frame.
    pub t: usize,
    pub n: usize,
    pub df: usize,
    pub dt: usize,
    pub mode: ChainMode,
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Clipping threshold (resolved value; no auto here).
    pub clip: f64,
    /// Channel estimation error power (fraction of the unit channel power).
    pub csi_err: f64,
    pub channel: ChannelSpec,
    pub fd: f64,
    pub delta_f: f64,
    pub t_sym: f64,
    pub master_seed: u64,
    /// Frames per trial; 0 picks a size targeting ~64 kbit per trial.
    pub frames_per_trial: usize,
    /// Tap equalized noise (v) and deprecoded noise (w) moments.
    pub collect_noise_moments: bool,
    /// Tap per-symbol error moments at the deprecoder output.
    pub collect_error_moments: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            s: 512,
            t: 0,
            n: 16,
            df: 40,
            dt: 11,
            mode: ChainMode::Precoded,
            snr_db: 10.0,
            clip: 0.75,
            csi_err: 0.0,
            channel: ChannelSpec::Tdl(TapProfile::vehicular_a()),
            fd: 389.0,
            delta_f: 1e6 / 91.0,
            t_sym: 102e-6,
            master_seed: 1,
            frames_per_trial: 0,
            collect_noise_moments: false,
            collect_error_moments: false,
        }
    }
}

/// Per-trial accumulators; merge is associative so trials can be
/// combined in any grouping.
#[derive(Clone, Debug)]
pub struct TrialStats<T> {
    pub bits_sent: u64,
    pub bit_errors: u64,
    /// Equalized noise samples (v).
    pub v: MomentAccumulator<T>,
    /// Deprecoded noise samples (w).
    pub w: MomentAccumulator<T>,
    /// Symbol errors at the deprecoder output (d_hat - d).
    pub err: MomentAccumulator<T>,
}

impl<T: Scalar> Default for TrialStats<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> TrialStats<T> {
    pub fn new() -> Self {
        Self {
            bits_sent: 0,
            bit_errors: 0,
            v: MomentAccumulator::new(),
            w: MomentAccumulator::new(),
            err: MomentAccumulator::new(),
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.bits_sent += other.bits_sent;
        self.bit_errors += other.bit_errors;
        self.v.merge(&other.v);
        self.w.merge(&other.w);
        self.err.merge(&other.err);
    }

    pub fn ber(&self) -> f64 {
        if self.bits_sent == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_sent as f64
        }
    }
}

/// Gray-mapped QPSK, unit average power: bit pair `(b0, b1)` selects
/// `((1-2 b0) + j (1-2 b1)) / sqrt(2)`, so `[0, 0] -> (1+j)/sqrt(2)`.
pub fn qpsk_map<T: Scalar>(bits: &[u8]) -> Result<Vec<Cplx<T>>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::SizeMismatch {
            what: "qpsk bit count (must be even)",
            expected: bits.len() + 1,
            got: bits.len(),
        });
    }
    let amp = T::cast(std::f64::consts::FRAC_1_SQRT_2);
    Ok(bits
        .chunks_exact(2)
        .map(|b| {
            let re = if b[0] == 0 { amp } else { -amp };
            let im = if b[1] == 0 { amp } else { -amp };
            Cplx::new(re, im)
        })
        .collect())
}

/// Hard per-quadrant decisions. Ties on an axis (exact zero component)
/// resolve to bit 0.
pub fn qpsk_demap<T: Scalar>(symbols: &[Cplx<T>]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in symbols {
        bits.push(u8::from(s.re < T::zero()));
        bits.push(u8::from(s.im < T::zero()));
    }
    bits
}

/// A validated, ready-to-run link.
pub struct Link<T> {
    cfg: LinkConfig,
    map: GridMap,
    sigma_n2: Option<T>,
    clip: T,
    use_estimate: bool,
    frames_per_trial: usize,
    streams: Streams,
    _marker: std::marker::PhantomData<T>,
}

/// Independent random streams per frame, one per role.
const STREAMS_PER_FRAME: u64 = 4;
const STREAM_FADING: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_BITS: u64 = 2;
const STREAM_CSI: u64 = 3;

impl<T: Scalar> Link<T> {
    pub fn new(cfg: &LinkConfig) -> Result<Self> {
        match cfg.mode {
            ChainMode::Uncoded if cfg.n != 1 => {
                return Err(Error::InvalidParameter {
                    name: "n",
                    reason: format!("mode uncoded requires n = 1, got {}", cfg.n),
                })
            }
            ChainMode::OfdmCdm if cfg.n != cfg.s => {
                return Err(Error::InvalidParameter {
                    name: "n",
                    reason: format!("mode ofdm-cdm requires n = s = {}, got {}", cfg.s, cfg.n),
                })
            }
            _ => {}
        }
        if !cfg.clip.is_finite() || cfg.clip < 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("clipping threshold must be >= 0, got {}", cfg.clip),
            });
        }
        if cfg.csi_err < 0.0 {
            return Err(Error::InvalidParameter {
                name: "csi_err",
                reason: format!("must be >= 0, got {}", cfg.csi_err),
            });
        }
        let map = match cfg.mode {
            ChainMode::OfdmCdm => GridMap::consecutive(cfg.s, cfg.t)?,
            _ => GridMap::strided(cfg.s, cfg.t, cfg.n, cfg.df, cfg.dt)?,
        };
        let frame_bits = 2 * map.subcarriers() * map.periods();
        let frames_per_trial = if cfg.frames_per_trial == 0 {
            (65_536usize).div_ceil(frame_bits).max(1)
        } else {
            cfg.frames_per_trial
        };
        Ok(Self {
            map,
            sigma_n2: sigma_n2_from_snr_db(T::cast(cfg.snr_db)),
            clip: T::cast(cfg.clip),
            use_estimate: cfg.csi_err > 0.0,
            frames_per_trial,
            streams: Streams::new(cfg.master_seed),
            cfg: cfg.clone(),
            _marker: std::marker::PhantomData,
        })
    }

    pub fn grid_map(&self) -> &GridMap {
        &self.map
    }

    pub fn frame_bits(&self) -> u64 {
        2 * (self.map.subcarriers() * self.map.periods()) as u64
    }

    pub fn trial_bits(&self) -> u64 {
        self.frame_bits() * self.frames_per_trial as u64
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    /// Run one deterministic trial. Identical `(config, trial)` pairs
    /// produce identical statistics.
    pub fn run_trial(&self, trial: u64) -> TrialStats<T> {
        let mut stats = TrialStats::new();
        for frame in 0..self.frames_per_trial {
            let fidx = trial * self.frames_per_trial as u64 + frame as u64;
            self.run_frame(fidx, &mut stats);
        }
        stats
    }

    fn run_frame(&self, fidx: u64, stats: &mut TrialStats<T>) {
        let s = self.map.subcarriers();
        let t = self.map.periods();
        let n = self.map.block_size();
        let cells = s * t;
        let base = fidx * STREAMS_PER_FRAME;

        let mut bits_rng = self.streams.stream(base + STREAM_BITS);
        let bits = random_bits(&mut bits_rng, 2 * cells);
        let mut syms = qpsk_map::<T>(&bits).expect("even bit count");
        let reference = self
            .cfg
            .collect_error_moments
            .then(|| syms.clone());

        // precode blockwise (orthonormal Walsh-Hadamard)
        for block in syms.chunks_exact_mut(n) {
            fwht_in_place(block).expect("power-of-two block");
        }
        let tx = interleave_flat(&syms, &self.map).expect("sized frame");

        let mut fading_rng = self.streams.stream(base + STREAM_FADING);
        let ch = match &self.cfg.channel {
            ChannelSpec::Tdl(profile) => ChannelRealization::realize(
                profile,
                self.cfg.fd,
                s,
                t,
                self.cfg.delta_f,
                self.cfg.t_sym,
                &mut fading_rng,
            )
            .expect("validated channel parameters"),
            ChannelSpec::Unity => ChannelRealization::unity(s, t),
            ChannelSpec::IidRayleigh => ChannelRealization::iid_rayleigh(s, t, &mut fading_rng),
        };
        let ch = if self.use_estimate {
            let mut csi_rng = self.streams.stream(base + STREAM_CSI);
            ch.with_estimate(self.cfg.csi_err, &mut csi_rng)
                .expect("validated csi error")
        } else {
            ch
        };

        let mut rx = apply_fading(&tx, &ch).expect("matched dims");
        let mut noise = self
            .cfg
            .collect_noise_moments
            .then(|| vec![Cplx::new(T::zero(), T::zero()); cells]);
        if let Some(var) = self.sigma_n2 {
            let mut noise_rng = self.streams.stream(base + STREAM_NOISE);
            let dist = ComplexNormal::new(var).expect("positive variance");
            match noise.as_mut() {
                Some(buf) => {
                    for (cell, slot) in rx.cells_mut().iter_mut().zip(buf.iter_mut()) {
                        let nn = dist.sample(&mut noise_rng);
                        *cell += nn;
                        *slot = nn;
                    }
                }
                None => {
                    for cell in rx.cells_mut() {
                        *cell += dist.sample(&mut noise_rng);
                    }
                }
            }
        }

        let eq = EqualizerProfile {
            c: self.clip,
            use_estimate: self.use_estimate,
        };
        let y = crate::equalizer::equalize(&rx, &ch, &eq).expect("matched dims");

        let mut estimates = deinterleave_flat(&y, &self.map).expect("matched dims");
        for block in estimates.chunks_exact_mut(n) {
            fwht_in_place(block).expect("power-of-two block");
        }

        let decided = qpsk_demap(&estimates);
        stats.bits_sent += bits.len() as u64;
        stats.bit_errors += bits
            .iter()
            .zip(&decided)
            .filter(|(a, b)| a != b)
            .count() as u64;

        if let Some(reference) = reference {
            for (est, d) in estimates.iter().zip(&reference) {
                stats.err.push(est - d);
            }
        }

        if let Some(noise) = noise {
            // noise-only path through the same gains and deprecoder
            let h_used = ch.h_for_equalizer(self.use_estimate);
            let v: Vec<Cplx<T>> = noise
                .iter()
                .zip(h_used)
                .map(|(&nn, &h)| gain(h, self.clip) * nn)
                .collect();
            let vgrid = OfdmGrid::from_cells(s, t, v).expect("sized grid");
            let mut blocks = deinterleave_flat(&vgrid, &self.map).expect("matched dims");
            for &x in &blocks {
                stats.v.push(x);
            }
            for block in blocks.chunks_exact_mut(n) {
                fwht_in_place(block).expect("power-of-two block");
            }
            for &x in &blocks {
                stats.w.push(x);
            }
        }
    }
}

/// Convenience wrapper building the link on the fly.
pub fn run_trial<T: Scalar>(cfg: &LinkConfig, trial: u64) -> Result<TrialStats<T>> {
    Ok(Link::<T>::new(cfg)?.run_trial(trial))
}

fn random_bits(rng: &mut impl RngCore, count: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(count);
    while bits.len() < count {
        let mut word = rng.next_u64();
        let take = (count - bits.len()).min(64);
        for _ in 0..take {
            bits.push((word & 1) as u8);
            word >>= 1;
        }
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cplx<f64>;

    #[test]
    fn qpsk_gray_corner_convention() {
        let syms = qpsk_map::<f64>(&[0, 0, 0, 1, 1, 0, 1, 1]).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(syms[0], C::new(a, a));
        assert_eq!(syms[1], C::new(a, -a));
        assert_eq!(syms[2], C::new(-a, a));
        assert_eq!(syms[3], C::new(-a, -a));
        for s in &syms {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qpsk_round_trip_and_quadrants() {
        let bits: Vec<u8> = (0..64).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let syms = qpsk_map::<f64>(&bits).unwrap();
        assert_eq!(qpsk_demap(&syms), bits);
        // second quadrant point
        assert_eq!(qpsk_demap(&[C::new(-0.1, 0.9)]), vec![1, 0]);
        // tie on the real axis resolves to bit 0
        assert_eq!(qpsk_demap(&[C::new(0.0, 1.0)]), vec![0, 0]);
        assert_eq!(qpsk_demap(&[C::new(0.0, -1.0)]), vec![0, 1]);
    }

    #[test]
    fn odd_bit_count_rejected() {
        assert!(qpsk_map::<f64>(&[0, 1, 0]).is_err());
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = LinkConfig {
            s: 64,
            n: 16,
            df: 8,
            dt: 3,
            snr_db: 8.0,
            collect_noise_moments: true,
            ..LinkConfig::default()
        };
        let a = run_trial::<f64>(&cfg, 5).unwrap();
        let b = run_trial::<f64>(&cfg, 5).unwrap();
        assert_eq!(a.bits_sent, b.bits_sent);
        assert_eq!(a.bit_errors, b.bit_errors);
        let (mv_a, mv_b) = (a.v.moments().unwrap(), b.v.moments().unwrap());
        assert_eq!(mv_a.power, mv_b.power);
        assert_eq!(mv_a.var_of_square, mv_b.var_of_square);
        let c = run_trial::<f64>(&cfg, 6).unwrap();
        assert_ne!(a.bit_errors, c.bit_errors);
    }

    #[test]
    fn noiseless_pure_zf_is_bit_exact_for_every_mode() {
        for (mode, n) in [
            (ChainMode::Precoded, 16),
            (ChainMode::Uncoded, 1),
            (ChainMode::OfdmCdm, 64),
        ] {
            let cfg = LinkConfig {
                s: 64,
                n,
                df: 8,
                dt: 3,
                mode,
                snr_db: f64::INFINITY,
                clip: 0.0,
                ..LinkConfig::default()
            };
            let stats = run_trial::<f64>(&cfg, 0).unwrap();
            assert!(stats.bits_sent > 0);
            assert_eq!(stats.bit_errors, 0, "mode {:?}", mode);
        }
    }

    #[test]
    fn mode_constraints_enforced() {
        let cfg = LinkConfig {
            mode: ChainMode::Uncoded,
            n: 4,
            ..LinkConfig::default()
        };
        assert!(Link::<f64>::new(&cfg).is_err());
        let cfg = LinkConfig {
            mode: ChainMode::OfdmCdm,
            n: 16,
            ..LinkConfig::default()
        };
        assert!(Link::<f64>::new(&cfg).is_err());
    }

    #[test]
    fn noise_power_preserved_through_deprecoder() {
        // sigma_w^2 == sigma_v^2 (orthonormal mixing), checked on tapped
        // accumulators from a live trial.
        let cfg = LinkConfig {
            s: 256,
            t: 0,
            n: 16,
            df: 32,
            dt: 2,
            snr_db: 10.0,
            clip: 0.75,
            collect_noise_moments: true,
            frames_per_trial: 4,
            ..LinkConfig::default()
        };
        let stats = run_trial::<f64>(&cfg, 0).unwrap();
        let (v, w) = (stats.v.moments().unwrap(), stats.w.moments().unwrap());
        assert!(v.count >= 1_000);
        let ratio = w.power / v.power;
        assert!((ratio - 1.0).abs() < 1e-9, "sigma_w^2/sigma_v^2 = {ratio}");
    }

    #[test]
    fn awgn_uncoded_ber_matches_closed_form() {
        // Q(sqrt(10^(snr/10))) at 4 dB = 5.6495e-2 for Gray QPSK with
        // sigma_n^2 = 1/10^(snr/10).
        let cfg = LinkConfig {
            mode: ChainMode::Uncoded,
            n: 1,
            channel: ChannelSpec::Unity,
            snr_db: 4.0,
            clip: 0.0,
            frames_per_trial: 0,
            ..LinkConfig::default()
        };
        let link = Link::<f64>::new(&cfg).unwrap();
        let mut total = TrialStats::new();
        for trial in 0..4 {
            total.merge(&link.run_trial(trial));
        }
        assert!(total.bits_sent >= 200_000);
        let expect = 5.6495e-2;
        let rel = (total.ber() - expect).abs() / expect;
        assert!(rel < 0.05, "BER {} vs {expect}", total.ber());
    }

    #[test]
    fn f32_instantiation_runs() {
        let cfg = LinkConfig {
            s: 64,
            n: 16,
            df: 8,
            dt: 2,
            snr_db: 10.0,
            ..LinkConfig::default()
        };
        let stats = run_trial::<f32>(&cfg, 0).unwrap();
        assert!(stats.bits_sent > 0);
    }
}
