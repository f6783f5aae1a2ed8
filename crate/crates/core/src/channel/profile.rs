//! Tapped-delay-line power profiles.

use crate::error::{Error, Result};

/// One multipath tap: excess delay and relative power.
#[derive(Clone, Copy, Debug)]
pub struct Tap {
    pub delay_ns: f64,
    pub power_db: f64,
    /// Linear power after normalizing the profile to unit total power.
    pub power_lin: f64,
}

/// Multipath delay profile, normalized so linear powers sum to one.
#[derive(Clone, Debug)]
pub struct TapProfile {
    taps: Vec<Tap>,
}

impl TapProfile {
    pub fn new(delays_ns: &[f64], powers_db: &[f64]) -> Result<Self> {
        if delays_ns.is_empty() || delays_ns.len() != powers_db.len() {
            return Err(Error::InvalidParameter {
                name: "tap profile",
                reason: format!(
                    "need equal nonzero tap counts, got {} delays / {} powers",
                    delays_ns.len(),
                    powers_db.len()
                ),
            });
        }
        for w in delays_ns.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter {
                    name: "tap delays",
                    reason: format!("must be strictly increasing, got {} after {}", w[1], w[0]),
                });
            }
        }
        let lin: Vec<f64> = powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        let taps = delays_ns
            .iter()
            .zip(powers_db)
            .zip(&lin)
            .map(|((&delay_ns, &power_db), &l)| Tap {
                delay_ns,
                power_db,
                power_lin: l / total,
            })
            .collect();
        Ok(Self { taps })
    }

    /// ITU Vehicular A profile.
    pub fn vehicular_a() -> Self {
        Self::new(
            &[0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0],
            &[0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
        )
        .expect("built-in profile is valid")
    }

    /// Parse a profile from `<delay_ns> <power_db>` lines; `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut delays = Vec::new();
        let mut powers = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (d, p) = match (parts.next(), parts.next(), parts.next()) {
                (Some(d), Some(p), None) => (d, p),
                _ => {
                    return Err(Error::Profile {
                        line: i + 1,
                        msg: format!("expected `<delay_ns> <power_db>`, got `{raw}`"),
                    })
                }
            };
            let d: f64 = d.parse().map_err(|e| Error::Profile {
                line: i + 1,
                msg: format!("bad delay `{d}`: {e}"),
            })?;
            let p: f64 = p.parse().map_err(|e| Error::Profile {
                line: i + 1,
                msg: format!("bad power `{p}`: {e}"),
            })?;
            delays.push(d);
            powers.push(p);
        }
        Self::new(&delays, &powers)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }

    /// Analytic frequency correlation of the profile at separation `df_hz`:
    /// `|sum_l p_l exp(-j 2 pi df tau_l)|`.
    pub fn freq_correlation(&self, df_hz: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for tap in &self.taps {
            let phase = -2.0 * std::f64::consts::PI * df_hz * tap.delay_ns * 1e-9;
            re += tap.power_lin * phase.cos();
            im += tap.power_lin * phase.sin();
        }
        (re * re + im * im).sqrt()
    }
}
