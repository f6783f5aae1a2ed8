//! Sweep orchestration: Monte-Carlo points with confidence-aware
//! stopping, CSV emission and the derived summaries the experiments
//! need. Trials inside a point run in parallel; results are merged in
//! trial order, so a given config and seed always produce the same CSV.

use super::config::{ClipSpec, RunConfig, Series};
use crate::analysis::{
    self, gain_moments, mse_predict, noise_moments_v, noise_moments_w, optimum_c, Convention,
};
use crate::chain::{ChainMode, Link, TrialStats};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    BerVsSnr,
    BerVsClip,
    OptClipVsSnr,
    CsiPenalty,
    NoiseMoments,
    MseCheck,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::BerVsSnr => "ber-vs-snr",
            SweepKind::BerVsClip => "ber-vs-clip",
            SweepKind::OptClipVsSnr => "opt-clip-vs-snr",
            SweepKind::CsiPenalty => "csi-penalty",
            SweepKind::NoiseMoments => "noise-moments",
            SweepKind::MseCheck => "mse-check",
        }
    }
}

/// One result row. The first eleven CSV columns are fixed across all
/// sweep kinds; kind-specific metrics follow as extra columns.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub mode: ChainMode,
    pub n: usize,
    pub snr_db: f64,
    pub c: f64,
    pub csi_err: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci_halfwidth: f64,
    pub seed: u64,
    pub converged: bool,
    pub extras: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(
            w,
            "sweep_kind,mode,n,snr_db,c,csi_err,bits,errors,ber,ci_halfwidth,seed,converged"
        )?;
        for col in &self.extra_columns {
            write!(w, ",{col}")?;
        }
        writeln!(w)?;
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                self.kind.name(),
                r.mode.name(),
                r.n,
                fmt_f64(r.snr_db),
                fmt_f64(r.c),
                fmt_f64(r.csi_err),
                r.bits,
                r.errors,
                fmt_f64(r.ber),
                fmt_f64(r.ci_halfwidth),
                r.seed,
                u8::from(r.converged),
            )?;
            for x in &r.extras {
                write!(w, ",{}", fmt_f64(*x))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("csv is utf8")
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// 95% binomial confidence half-width (normal approximation).
pub fn ci_halfwidth(errors: u64, bits: u64) -> f64 {
    if bits == 0 {
        return 0.0;
    }
    let p = errors as f64 / bits as f64;
    1.96 * (p * (1.0 - p) / bits as f64).sqrt()
}

/// Fixed batch size so stopping decisions do not depend on the number
/// of worker threads.
const TRIAL_BATCH: u64 = 8;

/// Run trials until the point has `min_errors` bit errors or `max_bits`
/// bits, whichever comes first.
pub fn run_point(link: &Link<f64>, min_errors: u64, max_bits: u64) -> TrialStats<f64> {
    let mut total = TrialStats::new();
    let mut next = 0u64;
    loop {
        let batch: Vec<TrialStats<f64>> = (next..next + TRIAL_BATCH)
            .into_par_iter()
            .map(|i| link.run_trial(i))
            .collect();
        for s in &batch {
            total.merge(s);
        }
        next += TRIAL_BATCH;
        if total.bit_errors >= min_errors || total.bits_sent >= max_bits {
            return total;
        }
    }
}

/// Run trials until at least `min_symbols` symbols have been observed.
pub fn run_point_symbols(link: &Link<f64>, min_symbols: u64) -> TrialStats<f64> {
    let trial_syms = link.trial_bits() / 2;
    let trials = min_symbols.div_ceil(trial_syms.max(1));
    let batch: Vec<TrialStats<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| link.run_trial(i))
        .collect();
    let mut total = TrialStats::new();
    for s in &batch {
        total.merge(s);
    }
    total
}

fn make_row(
    cfg: &RunConfig,
    mode: ChainMode,
    n: usize,
    snr_db: f64,
    c: f64,
    csi_err: f64,
    stats: &TrialStats<f64>,
) -> SweepRow {
    SweepRow {
        mode,
        n,
        snr_db,
        c,
        csi_err,
        bits: stats.bits_sent,
        errors: stats.bit_errors,
        ber: stats.ber(),
        ci_halfwidth: ci_halfwidth(stats.bit_errors, stats.bits_sent),
        seed: cfg.seed,
        converged: stats.bit_errors >= cfg.min_errors.max(10),
        extras: Vec::new(),
    }
}

/// Clipping threshold for a point: fixed value, or the predicted-MSE
/// optimum for the operating condition (1.0 when noise is disabled,
/// where the optimum is degenerate). Channel-estimation error acts as
/// extra effective noise of power `csi_err` at the equalizer, and the
/// receiver knows its estimator quality, so the auto threshold is
/// computed for `sigma_n^2 + csi_err`.
pub fn resolve_clip(
    cfg: &RunConfig,
    snr_db: f64,
    csi_err: f64,
    memo: &mut BTreeMap<(u64, u64), f64>,
) -> Result<f64> {
    match cfg.clip {
        ClipSpec::Fixed(v) => Ok(v),
        ClipSpec::Auto => {
            if !snr_db.is_finite() && csi_err == 0.0 {
                return Ok(1.0);
            }
            let key = (snr_db.to_bits(), csi_err.to_bits());
            if let Some(&c) = memo.get(&key) {
                return Ok(c);
            }
            let sigma_n2 = if snr_db.is_finite() {
                10f64.powf(-snr_db / 10.0)
            } else {
                0.0
            };
            let c = optimum_c(1.0, sigma_n2 + csi_err)?;
            memo.insert(key, c);
            Ok(c)
        }
    }
}

fn ber_point(
    cfg: &RunConfig,
    mode: ChainMode,
    n: usize,
    snr_db: f64,
    c: f64,
    csi_err: f64,
) -> Result<SweepRow> {
    let lc = cfg.link_config(mode, n, snr_db, c, csi_err)?;
    let link = Link::<f64>::new(&lc)?;
    let stats = run_point(&link, cfg.min_errors, cfg.max_bits);
    Ok(make_row(cfg, mode, lc.n, snr_db, c, csi_err, &stats))
}

const SNR_SERIES_DEFAULT: [Series; 4] = [
    Series { mode: ChainMode::Uncoded, n: 1 },
    Series { mode: ChainMode::OfdmCdm, n: 0 },
    Series { mode: ChainMode::Precoded, n: 16 },
    Series { mode: ChainMode::Precoded, n: 256 },
];

const CLIP_SERIES_DEFAULT: [Series; 3] = [
    Series { mode: ChainMode::Uncoded, n: 1 },
    Series { mode: ChainMode::Precoded, n: 16 },
    Series { mode: ChainMode::Precoded, n: 256 },
];

/// Run one experiment sweep.
pub fn run_sweep(kind: SweepKind, cfg: &RunConfig) -> Result<SweepTable> {
    match kind {
        SweepKind::BerVsSnr => ber_vs_snr(cfg),
        SweepKind::BerVsClip => ber_vs_clip(cfg),
        SweepKind::OptClipVsSnr => opt_clip_vs_snr(cfg),
        SweepKind::CsiPenalty => csi_penalty(cfg),
        SweepKind::NoiseMoments => noise_moments(cfg),
        SweepKind::MseCheck => mse_check(cfg),
    }
}

fn ber_vs_snr(cfg: &RunConfig) -> Result<SweepTable> {
    let mut memo = BTreeMap::new();
    let mut rows = Vec::new();
    for series in cfg.series_or(&SNR_SERIES_DEFAULT) {
        let n = if series.n == 0 { cfg.n } else { series.n };
        for snr in cfg.snr_axis() {
            let c = resolve_clip(cfg, snr, cfg.csi_err, &mut memo)?;
            rows.push(ber_point(cfg, series.mode, n, snr, c, cfg.csi_err)?);
        }
    }
    Ok(SweepTable {
        kind: SweepKind::BerVsSnr,
        extra_columns: vec![],
        rows,
    })
}

fn ber_vs_clip(cfg: &RunConfig) -> Result<SweepTable> {
    if !cfg.snr_db.is_finite() {
        return Err(Error::InvalidParameter {
            name: "snr_db",
            reason: "ber-vs-clip needs a finite SNR".into(),
        });
    }
    let mut rows = Vec::new();
    for series in cfg.series_or(&CLIP_SERIES_DEFAULT) {
        let n = if series.n == 0 { cfg.n } else { series.n };
        for c in cfg.c_axis() {
            rows.push(ber_point(cfg, series.mode, n, cfg.snr_db, c, cfg.csi_err)?);
        }
    }
    Ok(SweepTable {
        kind: SweepKind::BerVsClip,
        extra_columns: vec![],
        rows,
    })
}

/// Optimum threshold per SNR: the measured optimum minimizes the
/// empirical per-symbol MSE at the deprecoder output over the `c` axis
/// (the objective the predicted optimum minimizes in closed form).
fn opt_clip_vs_snr(cfg: &RunConfig) -> Result<SweepTable> {
    let mut rows = Vec::new();
    for snr in cfg.snr_axis() {
        if !snr.is_finite() {
            return Err(Error::InvalidParameter {
                name: "snr_list",
                reason: "opt-clip-vs-snr needs finite SNRs".into(),
            });
        }
        let sigma_n2 = 10f64.powf(-snr / 10.0);
        let c_pred = optimum_c(1.0, sigma_n2)?;

        let mut best: Option<(f64, f64, TrialStats<f64>)> = None;
        for c in cfg.c_axis() {
            let mut lc = cfg.link_config(ChainMode::Precoded, cfg.n, snr, c, cfg.csi_err)?;
            lc.collect_error_moments = true;
            let link = Link::<f64>::new(&lc)?;
            let stats = run_point_symbols(&link, cfg.moment_symbols);
            let mse = stats.err.moments().expect("symbols observed").power;
            if best.as_ref().is_none_or(|(_, m, _)| mse < *m) {
                best = Some((c, mse, stats));
            }
        }
        let (c_sim, mse_sim, stats) = best.expect("nonempty c axis");
        let gm = gain_moments(c_pred, Convention::ComplexCircular)?;
        let mse_pred = mse_predict(&gm, 1.0, sigma_n2, cfg.n).total;

        let mut row = make_row(cfg, ChainMode::Precoded, cfg.n, snr, c_sim, cfg.csi_err, &stats);
        row.extras = vec![c_pred, mse_sim, mse_pred];
        rows.push(row);
    }
    Ok(SweepTable {
        kind: SweepKind::OptClipVsSnr,
        extra_columns: vec!["c_pred", "mse_sim", "mse_pred"],
        rows,
    })
}

/// CSI-error penalty curves share one equalizer threshold (the clean
/// optimum at the configured `snr_db`), so the curves differ only in
/// the estimation error and horizontal shifts are meaningful.
fn csi_penalty(cfg: &RunConfig) -> Result<SweepTable> {
    let mut memo = BTreeMap::new();
    let c = resolve_clip(cfg, cfg.snr_db, 0.0, &mut memo)?;
    let mut rows = Vec::new();
    for n in cfg.n_axis(&[16, 256]) {
        for csi in cfg.csi_axis() {
            for snr in cfg.snr_axis() {
                rows.push(ber_point(cfg, ChainMode::Precoded, n, snr, c, csi)?);
            }
        }
    }
    Ok(SweepTable {
        kind: SweepKind::CsiPenalty,
        extra_columns: vec![],
        rows,
    })
}

fn noise_moments(cfg: &RunConfig) -> Result<SweepTable> {
    if !cfg.snr_db.is_finite() {
        return Err(Error::InvalidParameter {
            name: "snr_db",
            reason: "noise-moments needs a finite SNR".into(),
        });
    }
    let sigma_n2 = 10f64.powf(-cfg.snr_db / 10.0);
    let mut memo = BTreeMap::new();
    let c = resolve_clip(cfg, cfg.snr_db, cfg.csi_err, &mut memo)?;
    let gm_cc = gain_moments(c, Convention::ComplexCircular)?;
    let gm_pr = gain_moments(c, Convention::PaperReal)?;
    let v_cc = noise_moments_v(sigma_n2, &gm_cc);
    let v_pr = noise_moments_v(sigma_n2, &gm_pr);

    let mut rows = Vec::new();
    for n in cfg.n_axis(&[1, 16, 256]) {
        let mut lc = cfg.link_config(ChainMode::Precoded, n, cfg.snr_db, c, cfg.csi_err)?;
        lc.collect_noise_moments = true;
        let link = Link::<f64>::new(&lc)?;
        let stats = run_point_symbols(&link, cfg.moment_symbols);
        let mv = stats.v.moments().expect("noise samples");
        let mw = stats.w.moments().expect("noise samples");

        let selected = analysis::select_convention(mv.var_of_square, v_cc.var_v2, v_pr.var_v2);
        let w_cc = noise_moments_w(n, v_cc.sigma_v2, v_cc.e_v4, Convention::ComplexCircular);
        let w_pr = noise_moments_w(n, v_pr.sigma_v2, v_pr.e_v4, Convention::PaperReal);

        let mut row = make_row(cfg, ChainMode::Precoded, n, cfg.snr_db, c, cfg.csi_err, &stats);
        row.extras = vec![
            mv.power,
            mv.var_of_square,
            mw.power,
            mw.var_of_square,
            v_cc.sigma_v2,
            v_cc.var_v2,
            v_pr.var_v2,
            w_cc.var_w2,
            w_pr.var_w2,
            selected.gaussian_fourth_coeff(),
        ];
        rows.push(row);
    }
    Ok(SweepTable {
        kind: SweepKind::NoiseMoments,
        extra_columns: vec![
            "sigma_v2_sim",
            "var_v2_sim",
            "sigma_w2_sim",
            "var_w2_sim",
            "sigma_v2_pred",
            "var_v2_pred_cc",
            "var_v2_pred_pr",
            "var_w2_pred_cc",
            "var_w2_pred_pr",
            "gauss4_coeff_selected",
        ],
        rows,
    })
}

fn mse_check(cfg: &RunConfig) -> Result<SweepTable> {
    let c = match cfg.clip {
        ClipSpec::Fixed(v) => v,
        ClipSpec::Auto => 1.0,
    };
    let gm = gain_moments(c, Convention::ComplexCircular)?;
    let mut rows = Vec::new();
    for n in cfg.n_axis(&[1, 16, 256]) {
        let mut lc = cfg.link_config(ChainMode::Precoded, n, f64::INFINITY, c, 0.0)?;
        lc.collect_error_moments = true;
        let link = Link::<f64>::new(&lc)?;
        let stats = run_point_symbols(&link, cfg.moment_symbols);
        let mse_sim = stats.err.moments().expect("symbols observed").power;
        let pred = mse_predict(&gm, 1.0, 0.0, n);
        let bias = gm.e_t - 1.0;

        let mut row = make_row(cfg, ChainMode::Precoded, n, f64::INFINITY, c, 0.0, &stats);
        row.extras = vec![
            mse_sim,
            pred.noiseless(),
            bias * bias,
            pred.sigma_dist2,
            pred.sigma_intf2,
        ];
        rows.push(row);
    }
    Ok(SweepTable {
        kind: SweepKind::MseCheck,
        extra_columns: vec![
            "mse_sim",
            "mse_pred",
            "mse_pred_mean_only",
            "sigma_dist2_pred",
            "sigma_intf2_pred",
        ],
        rows,
    })
}

/// Horizontal SNR penalty of each CSI-errored curve against the clean
/// one, read at the given BER level by log-linear interpolation.
#[derive(Clone, Copy, Debug)]
pub struct PenaltyRow {
    pub n: usize,
    pub csi_err: f64,
    pub snr_at_level: f64,
    pub penalty_db: f64,
}

pub fn csi_penalty_summary(table: &SweepTable, ber_level: f64) -> Vec<PenaltyRow> {
    let mut curves: BTreeMap<(usize, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &table.rows {
        curves
            .entry((r.n, r.csi_err.to_bits()))
            .or_default()
            .push((r.snr_db, r.ber));
    }
    for pts in curves.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let mut out = Vec::new();
    let ns: Vec<usize> = {
        let mut v: Vec<usize> = curves.keys().map(|k| k.0).collect();
        v.dedup();
        v
    };
    for n in ns {
        let clean = curves
            .get(&(n, 0f64.to_bits()))
            .and_then(|pts| crossing(pts, ber_level));
        let Some(clean_snr) = clean else { continue };
        for ((cn, csi_bits), pts) in &curves {
            if *cn != n || *csi_bits == 0f64.to_bits() {
                continue;
            }
            if let Some(snr) = crossing(pts, ber_level) {
                out.push(PenaltyRow {
                    n,
                    csi_err: f64::from_bits(*csi_bits),
                    snr_at_level: snr,
                    penalty_db: snr - clean_snr,
                });
            }
        }
    }
    out
}

/// SNR where a descending BER curve crosses `level`, interpolating
/// linearly in (snr, log10 ber).
pub fn crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    for w in points.windows(2) {
        let (s0, b0) = w[0];
        let (s1, b1) = w[1];
        if b0 <= 0.0 || b1 <= 0.0 {
            continue;
        }
        if (b0 >= level && b1 <= level) || (b0 <= level && b1 >= level) {
            if b0 == b1 {
                return Some(s0);
            }
            let f = (level.log10() - b0.log10()) / (b1.log10() - b0.log10());
            return Some(s0 + f * (s1 - s0));
        }
    }
    None
}
