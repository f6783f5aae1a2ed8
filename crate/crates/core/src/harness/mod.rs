//! Experiment driver: configuration files, sweep orchestration with
//! confidence-aware stopping, CSV output.

pub mod config;
pub mod sweep;

pub use config::{load_config, parse_config, ClipSpec, ProfileSpec, RunConfig, Series};
pub use sweep::{
    ci_halfwidth, crossing, csi_penalty_summary, resolve_clip, run_point, run_point_symbols,
    run_sweep, PenaltyRow, SweepKind, SweepRow, SweepTable,
};
