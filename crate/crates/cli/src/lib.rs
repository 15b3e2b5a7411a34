//! Experiment orchestration: configuration, builtin presets, parallel sweeps
//! and CSV reports.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod presets;
pub mod report;
pub mod suite;

pub use config::ExperimentConfig;
pub use suite::{run_convergence_suite, run_projection_suite};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{experiment}{}: {source}", .p.map(|p| format!(" (p = {p})")).unwrap_or_default())]
    Run {
        experiment: String,
        p: Option<usize>,
        source: pldg_core::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
