//! Configuration, presets, command implementations and file formats for
//! the `subzero` command line.
//!
//! Metrics are comma-separated with the fixed header [`METRICS_HEADER`];
//! certificates and traces are JSON lines. Every float is written with 17
//! significant digits.

mod build;
mod commands;
mod config;
mod output;

pub use build::{build_game, build_pool, substream_seed, Experiment, Substream};
pub use commands::{
    cmd_plotdata, cmd_run, cmd_solve_ne, cmd_sweep, cmd_validate, run_config, run_sweep, solve_config,
    sweep_point_config, RunOutcome, RunSummary, Sweep, SweepPoint, COMPARISON_HEADER, PLOT_METRICS,
};
pub use config::{GameSpec, GeometrySpec, GraphSpec, NetworkSpec, OutputSpec, RunConfig, SolverSpec, StepSpec};
pub use output::{
    fmt_f64, format_metrics, format_trace, json_line, parse_metrics, read_certificate, write_certificate,
    CertificateRecord, METRICS_HEADER,
};

use crate::error::Error;

/// Shipped preset configs, by name.
pub const PRESETS: [(&str, &str); 5] = [
    ("interdiction-desk", include_str!("../../presets/interdiction-desk.toml")),
    ("interdiction-paper", include_str!("../../presets/interdiction-paper.toml")),
    ("power-allocation", include_str!("../../presets/power-allocation.toml")),
    ("matching-pennies", include_str!("../../presets/matching-pennies.toml")),
    ("matrix-2x2", include_str!("../../presets/matrix-2x2.toml")),
];

pub fn preset(name: &str) -> Option<RunConfig> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| RunConfig::from_toml(text).expect("shipped presets are valid"))
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Ok = 0,
    /// Unparseable or invalid configuration or input files.
    Config = 2,
    /// The game lacks a needed oracle, or a certificate could not be reached.
    Capability = 3,
    /// A guaranteed invariant broke at runtime.
    Internal = 4,
}

impl From<&Error> for ExitCode {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_)
            | Error::Parameter(_)
            | Error::Construction(_)
            | Error::Disconnected(_)
            | Error::GraphNotFound { .. }
            | Error::OutsideDomain { .. }
            | Error::Io(_) => ExitCode::Config,
            Error::Capability(_) | Error::OracleFailure { .. } | Error::CertificateFailure { .. } => {
                ExitCode::Capability
            }
            Error::SingularReference { .. } | Error::Internal(_) => ExitCode::Internal,
        }
    }
}
