//! Time-stepped simulation of a single-lane string of vehicles.

pub mod engine;
pub mod output;
pub mod scenario;
pub mod summary;

pub use engine::{
    advance, decide, init_string, run, run_on_threads, step, CollisionEvent, SimError, Trace,
    VehicleMeta, VehicleState, FLAG_COLLISION, FLAG_EMERGENCY, FLAG_INFEASIBLE,
};
pub use output::{
    summary_json, trace_csv_string, write_plot_csv, write_trace_csv, PLOT_HEADER, TRACE_HEADER,
};
pub use scenario::{
    CollisionPolicy, Placement, Scenario, ScenarioError, VehicleEntry, DEFAULT_COMMUNICATION_DELAY,
    DEFAULT_DRIVER_ID, DEFAULT_DT, DEFAULT_FRONT_SPACING, DEFAULT_LEADER_POSITION,
    DEFAULT_TIME_GAP_MIN_SPEED, DEFAULT_TRANSIENT_EXCLUSION,
};
pub use summary::{summarize, VehicleSummary};
