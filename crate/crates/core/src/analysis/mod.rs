//! Closed-form/quadrature side of the experiment: moments of the
//! clipped-ZF gain over the Rayleigh channel, equalized- and
//! deprecoded-noise moments, the mean-square-error decomposition and
//! the optimum clipping threshold. These serve as the independent
//! oracle the Monte-Carlo results are checked against.
//!
//! Fourth moments of products of complex Gaussians depend on whether
//! the Gaussian fourth-moment coefficient is taken as 3 (real-variable
//! algebra) or 2 (circularly symmetric complex variables). Both
//! conventions are implemented; the simulation cross-check selects one.
//!
//! The noiseless error decomposition sums to
//! `P_s (E[t^2] - 2 E[t] + 1) = P_s E[(t-1)^2]`,
//! independent of the block size.

pub mod quad;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use quad::integrate;

/// Gaussian fourth-moment convention for noise products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `E[|n|^4] = 2 sigma_n^4` (circularly symmetric complex Gaussian).
    ComplexCircular,
    /// `E[|n|^4] = 3 sigma_n^4` (real-Gaussian algebra).
    PaperReal,
}

impl Convention {
    /// The coefficient `kappa` in `E[|n|^4] = kappa sigma^4`.
    pub fn gaussian_fourth_coeff<T: Scalar>(self) -> T {
        match self {
            Convention::ComplexCircular => T::cast(2.0),
            Convention::PaperReal => T::cast(3.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::ComplexCircular => "complex-circular",
            Convention::PaperReal => "paper-real",
        }
    }
}

/// Moments of the combined response `t = g h` and of the gain `g` for
/// clipped ZF over the unit-power Rayleigh channel.
#[derive(Clone, Copy, Debug)]
pub struct GainMoments<T> {
    pub c: T,
    pub e_t: T,
    pub e_t2: T,
    pub e_g2: T,
    pub e_g4: T,
    pub convention: Convention,
}

impl<T: Scalar> GainMoments<T> {
    pub fn var_t(&self) -> T {
        self.e_t2 - self.e_t * self.e_t
    }
}

/// Relative quadrature tolerance for the moment integrals.
const QUAD_REL_TOL: f64 = 1e-10;

/// Rayleigh density with `E[h^2] = 1`: `f(x) = 2 x exp(-x^2)`.
#[inline]
fn rayleigh_pdf<T: Scalar>(x: T) -> T {
    T::cast(2.0) * x * (-x * x).exp()
}

/// Gain and response moments by adaptive quadrature on `[0, c]` and
/// `[c, X]` with the analytic Rayleigh tail beyond `X`.
pub fn gain_moments<T: Scalar>(c: T, convention: Convention) -> Result<GainMoments<T>> {
    if !c.is_finite() || c <= T::zero() {
        return Err(Error::GainMomentDivergence { c: c.as_f64() });
    }
    // exp(-X^2) is ~1e-16 at X = 6 and the integrands decay with it
    let x_max = (c + T::cast(2.0)).max(T::cast(6.0));
    let tail = (-x_max * x_max).exp();

    let below = |g: &dyn Fn(T) -> T| -> Result<T> {
        integrate(|x| g(x) * rayleigh_pdf(x), T::zero(), c, QUAD_REL_TOL)
    };
    let above = |g: &dyn Fn(T) -> T| -> Result<T> {
        integrate(|x| g(x) * rayleigh_pdf(x), c, x_max, QUAD_REL_TOL)
    };

    // t = |h|/c below the threshold and exactly 1 above it, so the tail
    // contributes its full probability mass.
    let e_t = below(&|x| x / c)? + above(&|_| T::one())? + tail;
    let e_t2 = below(&|x| (x / c) * (x / c))? + above(&|_| T::one())? + tail;
    // |g| = 1/c below the threshold, 1/|h| above it.
    let c2 = c * c;
    let e_g2 = below(&|_| T::one() / c2)? + above(&|x| T::one() / (x * x))? + tail / (x_max * x_max);
    let e_g4 = below(&|_| T::one() / (c2 * c2))?
        + above(&|x| T::one() / (x * x * x * x))?
        + tail / (x_max * x_max * x_max * x_max);

    Ok(GainMoments {
        c,
        e_t,
        e_t2,
        e_g2,
        e_g4,
        convention,
    })
}

/// Moments of the equalized noise `v = g n`.
#[derive(Clone, Copy, Debug)]
pub struct NoiseMomentsV<T> {
    pub sigma_v2: T,
    pub var_v2: T,
    /// E[|v|^4] under the selected convention.
    pub e_v4: T,
}

/// `sigma_v^2 = sigma_n^2 sigma_g^2` and
/// `var(|v|^2) = kappa sigma_n^4 E[|g|^4] - sigma_n^4 sigma_g^4`.
pub fn noise_moments_v<T: Scalar>(sigma_n2: T, gm: &GainMoments<T>) -> NoiseMomentsV<T> {
    let kappa: T = gm.convention.gaussian_fourth_coeff();
    let sn4 = sigma_n2 * sigma_n2;
    let e_v4 = kappa * sn4 * gm.e_g4;
    NoiseMomentsV {
        sigma_v2: sigma_n2 * gm.e_g2,
        var_v2: e_v4 - sn4 * gm.e_g2 * gm.e_g2,
        e_v4,
    }
}

/// Moments of the deprecoded noise `w` for block size `n`.
#[derive(Clone, Copy, Debug)]
pub struct NoiseMomentsW<T> {
    pub sigma_w2: T,
    pub var_w2: T,
}

/// Power is preserved (`sigma_w^2 = sigma_v^2`); the instantaneous
/// power variance mixes down as
/// `var(|w|^2) = E[|v|^4]/n + kappa (n-1)/n sigma_v^4 - sigma_v^4`.
pub fn noise_moments_w<T: Scalar>(
    n: usize,
    sigma_v2: T,
    e_v4: T,
    convention: Convention,
) -> NoiseMomentsW<T> {
    let kappa: T = convention.gaussian_fourth_coeff();
    let nf = T::cast(n as f64);
    let sv4 = sigma_v2 * sigma_v2;
    NoiseMomentsW {
        sigma_w2: sigma_v2,
        var_w2: e_v4 / nf + kappa * (nf - T::one()) / nf * sv4 - sv4,
    }
}

/// Large-block limit of `var(|w|^2)`: `(kappa - 1) sigma_v^4`
/// (the Gaussian fixed point of the mixing law).
pub fn var_w2_limit<T: Scalar>(sigma_v2: T, convention: Convention) -> T {
    let kappa: T = convention.gaussian_fourth_coeff();
    (kappa - T::one()) * sigma_v2 * sigma_v2
}

/// Mean-square-error decomposition at the deprecoder output.
#[derive(Clone, Copy, Debug)]
pub struct MsePrediction<T> {
    /// Self-distortion of each symbol.
    pub sigma_dist2: T,
    /// Orthogonality loss between block symbols.
    pub sigma_intf2: T,
    /// Equalized noise power `sigma_n^2 sigma_g^2`.
    pub noise: T,
    /// Total per-symbol error power.
    pub total: T,
}

impl<T: Scalar> MsePrediction<T> {
    /// Distortion + interference; equals `P_s E[(t-1)^2]` for any block
    /// size.
    pub fn noiseless(&self) -> T {
        self.sigma_dist2 + self.sigma_intf2
    }
}

/// Per-symbol MSE prediction for block size `n`:
/// `sigma_dist^2 = P_s (var(t)/n + (E[t]-1)^2)`,
/// `sigma_intf^2 = P_s (n-1)/n var(t)`,
/// `total = P_s E[(t-1)^2] + sigma_n^2 sigma_g^2`.
pub fn mse_predict<T: Scalar>(
    gm: &GainMoments<T>,
    p_s: T,
    sigma_n2: T,
    n: usize,
) -> MsePrediction<T> {
    let nf = T::cast(n as f64);
    let var_t = gm.var_t();
    let bias = gm.e_t - T::one();
    let sigma_dist2 = p_s * (var_t / nf + bias * bias);
    let sigma_intf2 = p_s * (nf - T::one()) / nf * var_t;
    let noise = sigma_n2 * gm.e_g2;
    MsePrediction {
        sigma_dist2,
        sigma_intf2,
        noise,
        total: sigma_dist2 + sigma_intf2 + noise,
    }
}

/// Optimum clipping threshold: argmin over `c > 0` of the predicted
/// total MSE, by coarse grid bracketing plus golden-section refinement
/// to 1e-4 in `c`.
pub fn optimum_c<T: Scalar>(p_s: T, sigma_n2: T) -> Result<T> {
    if !sigma_n2.is_finite() || sigma_n2 <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "sigma_n2",
            reason: format!("optimum threshold needs positive noise power, got {sigma_n2}"),
        });
    }
    let objective = |c: T| -> Result<T> {
        let gm = gain_moments(c, Convention::ComplexCircular)?;
        Ok(mse_predict(&gm, p_s, sigma_n2, 1).total)
    };

    // coarse log-spaced scan guards against non-unimodal surprises and
    // brackets optima anywhere from deep clipping to none at all
    let (lo, hi, points) = (1e-3f64, 4.0f64, 200usize);
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let grid: Vec<T> = (0..points)
        .map(|i| T::cast(lo * ratio.powi(i as i32)))
        .collect();
    let mut best = (0usize, T::infinity());
    let mut values = Vec::with_capacity(grid.len());
    for (i, &c) in grid.iter().enumerate() {
        let v = objective(c)?;
        values.push(v);
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == grid.len() - 1 {
        let shown: Vec<String> = grid
            .iter()
            .zip(&values)
            .step_by(15)
            .map(|(c, v)| format!("({c:.2}, {v:.4})"))
            .collect();
        return Err(Error::BracketFailure {
            grid: shown.join(" "),
        });
    }

    let (mut lo, mut hi) = (grid[best.0 - 1], grid[best.0 + 1]);
    let inv_phi = T::cast(0.618_033_988_749_894_8);
    let tol = T::cast(1e-4);
    let mut x1 = hi - (hi - lo) * inv_phi;
    let mut x2 = lo + (hi - lo) * inv_phi;
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while (hi - lo) > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = objective(x2)?;
        }
    }
    Ok((lo + hi) / T::cast(2.0))
}

/// Pick the convention whose prediction is closer to a simulated value.
pub fn select_convention<T: Scalar>(simulated: T, complex_pred: T, real_pred: T) -> Convention {
    if (simulated - complex_pred).abs() <= (simulated - real_pred).abs() {
        Convention::ComplexCircular
    } else {
        Convention::PaperReal
    }
}
