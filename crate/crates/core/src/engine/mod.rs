//! The distributed mirror descent engine: round-by-round simulation,
//! running averages, measured metrics and the theoretical bounds they are
//! compared against.

mod metrics;
mod sim;
mod steps;
mod theory;

pub use metrics::{compute_metric_rows, gap, regret, regret_series, MetricRow, GAP_ORACLE_TOL};
pub(crate) use metrics::gap_with;
pub use sim::{
    default_stride, run, AverageSnapshot, ConsensusRecord, RoundState, RunOptions, SimulationTrace,
    FULL_TRACE_LIMIT,
};
pub use steps::StepSchedule;
pub use theory::{
    consensus_bound_h, consensus_bound_series, regret_bound, theorem1_bound, theorem1_bound_series,
    theorem3_asymptotic, theorem3_error_bound, upsilon, TheoryConstants,
};
