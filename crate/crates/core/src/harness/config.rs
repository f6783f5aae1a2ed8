//! Plain-text `key = value` experiment configuration.
//!
//! Unknown keys are rejected and parse errors cite line numbers. An
//! empty file yields the default parameter set: 512 carriers at
//! 10.99 kHz spacing, Vehicular A fading at 389 Hz Doppler, QPSK,
//! interleaver strides of 40 subcarriers / 11 symbol periods.

use crate::chain::{ChainMode, ChannelSpec, LinkConfig};
use crate::channel::TapProfile;
use crate::error::{Error, Result};
use crate::numerics::is_power_of_two;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// Clipping threshold setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClipSpec {
    /// Minimize the predicted MSE for the operating SNR.
    Auto,
    Fixed(f64),
}

/// Named channel profile or a profile file on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileSpec {
    VehicularA,
    Awgn,
    RayleighIid,
    File(PathBuf),
}

/// One (mode, block size) curve in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Series {
    pub mode: ChainMode,
    /// Block size; ignored for uncoded (1) and ofdm-cdm (= s).
    pub n: usize,
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub df: usize,
    pub dt: usize,
    pub mode: ChainMode,
    pub profile: ProfileSpec,
    pub fd: f64,
    pub delta_f: f64,
    pub t_sym: f64,
    pub bw: f64,
    pub snr_db: f64,
    pub clip: ClipSpec,
    pub csi_err: f64,
    pub seed: u64,
    pub min_errors: u64,
    pub max_bits: u64,
    pub frames_per_trial: usize,
    pub threads: usize,
    pub ber_level: f64,
    pub moment_symbols: u64,
    pub snr_list: Option<Vec<f64>>,
    pub c_list: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub csi_list: Option<Vec<f64>>,
    pub series: Option<Vec<Series>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            s: 512,
            t: 0,
            n: 16,
            df: 40,
            dt: 11,
            mode: ChainMode::Precoded,
            profile: ProfileSpec::VehicularA,
            fd: 389.0,
            delta_f: 1e6 / 91.0,
            t_sym: 102e-6,
            bw: 5e6,
            snr_db: 10.0,
            clip: ClipSpec::Auto,
            csi_err: 0.0,
            seed: 1,
            min_errors: 100,
            max_bits: 100_000_000,
            frames_per_trial: 0,
            threads: 0,
            ber_level: 1e-3,
            moment_symbols: 2_000_000,
            snr_list: None,
            c_list: None,
            n_list: None,
            csi_list: None,
            series: None,
        }
    }
}

impl RunConfig {
    /// SNR axis; defaults to 0..24 dB in 2 dB steps.
    pub fn snr_axis(&self) -> Vec<f64> {
        self.snr_list
            .clone()
            .unwrap_or_else(|| (0..=12).map(|i| 2.0 * i as f64).collect())
    }

    /// Clipping axis; defaults to 0.05..1.60 in steps of 0.05.
    pub fn c_axis(&self) -> Vec<f64> {
        self.c_list
            .clone()
            .unwrap_or_else(|| (1..=32).map(|i| 0.05 * i as f64).collect())
    }

    pub fn n_axis(&self, default: &[usize]) -> Vec<usize> {
        self.n_list.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn csi_axis(&self) -> Vec<f64> {
        self.csi_list
            .clone()
            .unwrap_or_else(|| vec![0.0, 0.005, 0.01])
    }

    pub fn series_or(&self, default: &[Series]) -> Vec<Series> {
        self.series.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Resolve the channel selection into a chain-level spec.
    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        Ok(match &self.profile {
            ProfileSpec::VehicularA => ChannelSpec::Tdl(TapProfile::vehicular_a()),
            ProfileSpec::Awgn => ChannelSpec::Unity,
            ProfileSpec::RayleighIid => ChannelSpec::IidRayleigh,
            ProfileSpec::File(path) => ChannelSpec::Tdl(TapProfile::load(path)?),
        })
    }

    /// Base link configuration for one sweep point.
    pub fn link_config(
        &self,
        mode: ChainMode,
        n: usize,
        snr_db: f64,
        clip: f64,
        csi_err: f64,
    ) -> Result<LinkConfig> {
        let n = match mode {
            ChainMode::Uncoded => 1,
            ChainMode::OfdmCdm => self.s,
            ChainMode::Precoded => n,
        };
        Ok(LinkConfig {
            s: self.s,
            t: self.t,
            n,
            df: self.df,
            dt: self.dt,
            mode,
            snr_db,
            clip,
            csi_err,
            channel: self.channel_spec()?,
            fd: self.fd,
            delta_f: self.delta_f,
            t_sym: self.t_sym,
            master_seed: self.seed,
            frames_per_trial: self.frames_per_trial,
            collect_noise_moments: false,
            collect_error_moments: false,
        })
    }
}

/// Load a config file; an empty file gives the defaults.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Parse `key = value` text into a config.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut lines_of: HashMap<&'static str, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            msg: format!("expected `key = value`, got `{raw}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let err = |msg: String| Error::Config { line: line_no, msg };

        match key {
            "s" => cfg.s = parse_num(key, value, line_no)?,
            "t" => cfg.t = parse_num(key, value, line_no)?,
            "n" => cfg.n = parse_num(key, value, line_no)?,
            "df" => cfg.df = parse_num(key, value, line_no)?,
            "dt" => cfg.dt = parse_num(key, value, line_no)?,
            "mode" => cfg.mode = parse_mode(value).map_err(err)?,
            "profile" => {
                cfg.profile = match value {
                    "veh-a" | "vehicular-a" => ProfileSpec::VehicularA,
                    "awgn" => ProfileSpec::Awgn,
                    "rayleigh-iid" => ProfileSpec::RayleighIid,
                    path => ProfileSpec::File(PathBuf::from(path)),
                }
            }
            "fd" => cfg.fd = parse_num(key, value, line_no)?,
            "delta_f" => cfg.delta_f = parse_num(key, value, line_no)?,
            "t_sym" => cfg.t_sym = parse_num(key, value, line_no)?,
            "bw" => cfg.bw = parse_num(key, value, line_no)?,
            "snr_db" => {
                cfg.snr_db = if value == "inf" {
                    f64::INFINITY
                } else {
                    parse_num(key, value, line_no)?
                }
            }
            "c" => {
                cfg.clip = if value == "auto" {
                    ClipSpec::Auto
                } else {
                    ClipSpec::Fixed(parse_num(key, value, line_no)?)
                }
            }
            "csi_err" => cfg.csi_err = parse_num(key, value, line_no)?,
            "seed" => cfg.seed = parse_num(key, value, line_no)?,
            "min_errors" => cfg.min_errors = parse_num(key, value, line_no)?,
            "max_bits" => cfg.max_bits = parse_num(key, value, line_no)?,
            "frames_per_trial" => cfg.frames_per_trial = parse_num(key, value, line_no)?,
            "threads" => cfg.threads = parse_num(key, value, line_no)?,
            "ber_level" => cfg.ber_level = parse_num(key, value, line_no)?,
            "moment_symbols" => cfg.moment_symbols = parse_num(key, value, line_no)?,
            "snr_list" => cfg.snr_list = Some(parse_list(key, value, line_no)?),
            "c_list" => cfg.c_list = Some(parse_list(key, value, line_no)?),
            "n_list" => cfg.n_list = Some(parse_list(key, value, line_no)?),
            "csi_list" => cfg.csi_list = Some(parse_list(key, value, line_no)?),
            "series" => cfg.series = Some(parse_series(value).map_err(err)?),
            other => {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
        let tag: &'static str = match key {
            "n" => "n",
            "s" => "s",
            "mode" => "mode",
            _ => "",
        };
        if !tag.is_empty() {
            lines_of.insert(tag, line_no);
        }
    }

    finalize(cfg, &lines_of)
}

fn finalize(mut cfg: RunConfig, lines_of: &HashMap<&'static str, usize>) -> Result<RunConfig> {
    let line_for = |k: &str| lines_of.get(k).copied().unwrap_or(0);
    if !is_power_of_two(cfg.s) {
        return Err(Error::Config {
            line: line_for("s"),
            msg: format!("s = {} is not a power of two", cfg.s),
        });
    }
    if !is_power_of_two(cfg.n) {
        return Err(Error::Config {
            line: line_for("n"),
            msg: format!("n = {} is not a power of two", cfg.n),
        });
    }
    match cfg.mode {
        ChainMode::Uncoded => {
            if lines_of.contains_key("n") && cfg.n != 1 {
                return Err(Error::Config {
                    line: line_for("n"),
                    msg: format!("mode uncoded forces n = 1, but n = {} was set", cfg.n),
                });
            }
            cfg.n = 1;
        }
        ChainMode::OfdmCdm => {
            if lines_of.contains_key("n") && cfg.n != cfg.s {
                return Err(Error::Config {
                    line: line_for("n"),
                    msg: format!(
                        "mode ofdm-cdm forces n = s = {}, but n = {} was set",
                        cfg.s, cfg.n
                    ),
                });
            }
            cfg.n = cfg.s;
        }
        ChainMode::Precoded => {}
    }
    if let Some(ns) = &cfg.n_list {
        for &n in ns {
            if !is_power_of_two(n) {
                return Err(Error::Config {
                    line: 0,
                    msg: format!("n_list entry {n} is not a power of two"),
                });
            }
        }
    }
    Ok(cfg)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Config {
        line,
        msg: format!("bad value for `{key}`: {e}"),
    })
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|v| parse_num(key, v.trim(), line))
        .collect()
}

fn parse_mode(value: &str) -> std::result::Result<ChainMode, String> {
    match value {
        "precoded" => Ok(ChainMode::Precoded),
        "uncoded" => Ok(ChainMode::Uncoded),
        "ofdm-cdm" => Ok(ChainMode::OfdmCdm),
        other => Err(format!(
            "unknown mode `{other}` (expected precoded | uncoded | ofdm-cdm)"
        )),
    }
}

fn parse_series(value: &str) -> std::result::Result<Vec<Series>, String> {
    value
        .split(',')
        .map(|entry| {
            let entry = entry.trim();
            let (mode, n) = match entry.split_once(':') {
                Some((m, n)) => (
                    parse_mode(m.trim())?,
                    n.trim()
                        .parse::<usize>()
                        .map_err(|e| format!("bad block size in series `{entry}`: {e}"))?,
                ),
                None => (parse_mode(entry)?, 0),
            };
            Ok(Series { mode, n })
        })
        .collect()
}
