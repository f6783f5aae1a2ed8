//! Clipped zero-forcing equalization.
//!
//! Above the clipping threshold the gain inverts the channel exactly;
//! below it the magnitude is pinned to `1/c` while the phase is still
//! removed, so the combined response `t = g h` is real, in `[0, 1]`,
//! and equals one whenever `|h| >= c`.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::interleaver::OfdmGrid;
use crate::scalar::{Cplx, Scalar};

/// Equalizer settings: threshold and which response to invert.
#[derive(Clone, Copy, Debug)]
pub struct EqualizerProfile<T> {
    /// Clipping threshold as a linear amplitude against the unit-RMS
    /// channel. Zero degenerates to pure ZF (unbounded gain).
    pub c: T,
    /// Equalize with the noisy estimate instead of the true response.
    pub use_estimate: bool,
}

impl<T: Scalar> EqualizerProfile<T> {
    pub fn new(c: T, use_estimate: bool) -> Result<Self> {
        if !c.is_finite() || c < T::zero() {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("clipping threshold must be >= 0, got {c}"),
            });
        }
        Ok(Self { c, use_estimate })
    }
}

/// Clipped-ZF gain for one cell. A dead cell (`h = 0`) gets zero gain:
/// nothing is recoverable there.
#[inline]
pub fn gain<T: Scalar>(h: Cplx<T>, c: T) -> Cplx<T> {
    let mag2 = h.norm_sqr();
    if mag2 == T::zero() {
        return Cplx::new(T::zero(), T::zero());
    }
    let mag = mag2.sqrt();
    if mag >= c {
        h.conj() / mag2
    } else {
        h.conj() / (c * mag)
    }
}

/// Cellwise `y = gain(h) * r` over a whole grid.
pub fn equalize<T: Scalar>(
    grid: &OfdmGrid<T>,
    ch: &ChannelRealization<T>,
    prof: &EqualizerProfile<T>,
) -> Result<OfdmGrid<T>> {
    if grid.subcarriers() != ch.subcarriers() || grid.periods() != ch.periods() {
        return Err(Error::SizeMismatch {
            what: "equalizer grid",
            expected: ch.subcarriers() * ch.periods(),
            got: grid.len(),
        });
    }
    let h = ch.h_for_equalizer(prof.use_estimate);
    let cells = grid
        .cells()
        .iter()
        .zip(h)
        .map(|(&r, &h)| gain(h, prof.c) * r)
        .collect();
    OfdmGrid::from_cells(grid.subcarriers(), grid.periods(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_fading, ChannelRealization, TapProfile};
    use crate::numerics::rng::{ComplexNormal, Streams};
    use crate::numerics::MomentAccumulator;
    use rand::Rng;

    type C = Cplx<f64>;

    #[test]
    fn above_threshold_inverts_exactly() {
        let g = gain(C::new(1.0, 0.0), 0.5);
        assert!((g - C::new(1.0, 0.0)).norm() < 1e-15);
        let t = g * C::new(1.0, 0.0);
        assert!((t.re - 1.0).abs() < 1e-15 && t.im.abs() < 1e-15);
    }

    #[test]
    fn clipped_branch_has_bounded_gain_and_real_t() {
        let c = 0.8;
        let h = C::new(0.0, c / 2.0); // |h| = c/2
        let g = gain(h, c);
        assert!((g.norm() - 1.0 / c).abs() < 1e-15);
        let t = g * h;
        assert!((t.re - 0.5).abs() < 1e-15, "t = {t}");
        assert!(t.im.abs() < 1e-15);
    }

    #[test]
    fn branches_agree_on_the_boundary() {
        let c = 0.7;
        let h = C::new(0.0, c); // |h| = c exactly
        let g = gain(h, c);
        assert!((g - h.conj() / (c * c)).norm() < 1e-15);
        let t = g * h;
        assert!((t.re - 1.0).abs() < 1e-12 && t.im.abs() < 1e-15);
    }

    #[test]
    fn dead_cell_gets_zero_gain() {
        assert_eq!(gain(C::new(0.0, 0.0), 0.5).norm(), 0.0);
    }

    #[test]
    fn gain_magnitude_never_exceeds_clip_bound() {
        let mut rng = Streams::new(8).stream(0);
        let dist = ComplexNormal::<f64>::new(1.0).unwrap();
        let c = 0.6;
        for _ in 0..10_000 {
            let h = dist.sample(&mut rng);
            let g = gain(h, c);
            assert!(g.norm() <= 1.0 / c + 1e-12);
            // phase removed in both branches
            let t = g * h;
            assert!(t.im.abs() < 1e-12 && t.re >= 0.0);
        }
    }

    #[test]
    fn pure_zf_inverts_noiselessly() {
        let prof = TapProfile::vehicular_a();
        let mut rng = Streams::new(9).stream(0);
        let ch =
            ChannelRealization::realize(&prof, 389.0, 64, 8, 1e6 / 91.0, 102e-6, &mut rng).unwrap();
        let tx: Vec<C> = (0..512)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let grid = crate::interleaver::OfdmGrid::from_cells(64, 8, tx.clone()).unwrap();
        let rx = apply_fading(&grid, &ch).unwrap();
        let eq = equalize(&rx, &ch, &EqualizerProfile::new(0.0, false).unwrap()).unwrap();
        let max = eq
            .cells()
            .iter()
            .zip(&tx)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-9, "ZF residual {max}");
    }

    #[test]
    fn distortion_appears_only_below_threshold() {
        let prof = TapProfile::vehicular_a();
        let mut rng = Streams::new(10).stream(0);
        let ch =
            ChannelRealization::realize(&prof, 389.0, 64, 8, 1e6 / 91.0, 102e-6, &mut rng).unwrap();
        let tx = vec![C::new(1.0, 0.0); 512];
        let grid = crate::interleaver::OfdmGrid::from_cells(64, 8, tx).unwrap();
        let rx = apply_fading(&grid, &ch).unwrap();
        let eq = equalize(&rx, &ch, &EqualizerProfile::new(1.0, false).unwrap()).unwrap();
        for (i, (y, h)) in eq.cells().iter().zip(ch.h()).enumerate() {
            let t = y; // tx was 1, so eq output == t
            if h.norm() >= 1.0 {
                assert!((t.re - 1.0).abs() < 1e-12, "cell {i}");
            } else {
                assert!(t.re < 1.0, "cell {i} should be attenuated");
            }
        }
    }

    #[test]
    fn equalized_noise_power_matches_quadrature_sigma_g2() {
        // E[|g n|^2] = sigma_n^2 sigma_g^2 over Rayleigh cells.
        let mut rng = Streams::new(11).stream(0);
        let hdist = ComplexNormal::<f64>::new(1.0).unwrap();
        let c = 0.5;
        let sigma_n2 = 0.1;
        let ndist = ComplexNormal::<f64>::new(sigma_n2).unwrap();
        let mut acc = MomentAccumulator::new();
        for _ in 0..2_000_000 {
            let h = hdist.sample(&mut rng);
            let v = gain(h, c) * ndist.sample(&mut rng);
            acc.push(v);
        }
        let m = acc.moments().unwrap();
        // sigma_g^2 at c=0.5 from the independent quadrature oracle
        let sigma_g2 = 1.929079502158;
        let expect = sigma_n2 * sigma_g2;
        assert!(
            (m.power / expect - 1.0).abs() < 0.01,
            "sigma_v^2 {} vs {expect}",
            m.power
        );
    }

    #[test]
    fn noise_and_distortion_trade_monotonically_in_c() {
        let mut rng = Streams::new(12).stream(0);
        let hdist = ComplexNormal::<f64>::new(1.0).unwrap();
        let hs: Vec<C> = (0..200_000).map(|_| hdist.sample(&mut rng)).collect();
        let mut prev_g2 = f64::INFINITY;
        let mut prev_dist = -1.0;
        for c in [0.2, 0.5, 0.8, 1.2] {
            let mut g2 = 0.0;
            let mut t_mean = 0.0;
            for &h in &hs {
                let g = gain(h, c);
                g2 += g.norm_sqr();
                t_mean += (g * h).re;
            }
            g2 /= hs.len() as f64;
            t_mean /= hs.len() as f64;
            let dist = (t_mean - 1.0).powi(2);
            assert!(g2 < prev_g2, "E|g|^2 must fall with c");
            assert!(dist > prev_dist, "distortion must rise with c");
            prev_g2 = g2;
            prev_dist = dist;
        }
    }
}
