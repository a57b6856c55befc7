//! Delay sweep driver, report tables and charts.

pub mod config;
mod format;
mod plots;
mod sweep;
mod tables;
pub mod validate;

pub use config::{ExperimentConfig, GaSettings, MarginKind, DEFAULT_DELAYS, DEFAULT_SEED};
pub use format::format_sig6;
pub use plots::{emit_plots, render, PlotMetric, ReferenceData};
pub use sweep::{
    baseline_row, derive_seed, margin_for, run_baseline, run_single, run_sweep, simulate_gains, tune_row, Method,
    MethodAverages, SweepReport, SweepRow,
};
pub use tables::{emit_csv, INDICES_FILE, MEASURES_FILE, RUNS_FILE};
