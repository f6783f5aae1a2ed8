//! `pofdm`: Monte-Carlo experiment runner for the precoded-OFDM link.
//!
//! Each subcommand runs one sweep kind and writes a CSV table; see the
//! README for the configuration file format.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use precoded_ofdm::harness::{
    csi_penalty_summary, load_config, run_sweep, RunConfig, SweepKind, SweepTable,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pofdm",
    about = "Link-level simulator for Hadamard-precoded OFDM over fading channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`key = value` lines; defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = auto).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// BER curves vs SNR for the configured series.
    BerVsSnr,
    /// BER vs clipping threshold at the configured SNR.
    BerVsClip,
    /// Measured and predicted optimum clipping threshold per SNR.
    OptClipVsSnr,
    /// BER curves under channel-estimation error, with SNR penalties.
    CsiPenalty,
    /// Equalized/deprecoded noise moments vs block size, against both
    /// fourth-moment conventions.
    NoiseMoments,
    /// Noiseless per-symbol MSE vs block size against the prediction.
    MseCheck,
}

impl Command {
    fn kind(&self) -> SweepKind {
        match self {
            Command::BerVsSnr => SweepKind::BerVsSnr,
            Command::BerVsClip => SweepKind::BerVsClip,
            Command::OptClipVsSnr => SweepKind::OptClipVsSnr,
            Command::CsiPenalty => SweepKind::CsiPenalty,
            Command::NoiseMoments => SweepKind::NoiseMoments,
            Command::MseCheck => SweepKind::MseCheck,
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();

    let mut cfg = match &cli.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .context("configuring thread pool")?;
    }

    let kind = cli.command.kind();
    let table = run_sweep(kind, &cfg).context("running sweep")?;
    emit(&cli, &table)?;

    eprintln!(
        "{}: {} rows ({} not converged)",
        kind.name(),
        table.rows.len(),
        table.rows.iter().filter(|r| !r.converged).count()
    );
    if kind == SweepKind::CsiPenalty {
        for p in csi_penalty_summary(&table, cfg.ber_level) {
            eprintln!(
                "penalty @ BER {:.0e}: n = {}, csi_err = {}: {:+.2} dB (crossing {:.2} dB)",
                cfg.ber_level, p.n, p.csi_err, p.penalty_db, p.snr_at_level
            );
        }
    }
    Ok(())
}

fn emit(cli: &Cli, table: &SweepTable) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            table.write_csv(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            table.write_csv(&mut stdout.lock())?;
        }
    }
    Ok(())
}
