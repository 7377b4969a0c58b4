//! Longitudinal traffic microsimulation.
//!
//! Powertrain-limited acceleration and braking envelopes feed three
//! longitudinal control families (a human-driver IIDM variant, ACC-style PD
//! and CACC-style PID control) whose gains are re-tuned every step against
//! minimum safe distance and time gaps. A leader replays a driving schedule
//! and a string of followers reacts to it.
//!
//! Units are US customary throughout: ft, s, lb, slugs, revs/min.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod fleet;
pub mod models;
pub mod schedule;
pub mod sim;
pub mod units;

pub use control::{loop_metrics, tune_gains, LoopParams, Phase, StepMetrics};
pub use dynamics::{DynamicsError, DynamicsOutput, Environment};
pub use fleet::{CatalogError, DriverType, Fleet, VehicleSpec};
pub use models::{Capability, ControlContext, GainSet, Law};
pub use schedule::{parse_schedule, Schedule, ScheduleStats, SpeedUnits};
pub use sim::{run, summarize, Scenario, SimError, Trace, VehicleEntry, VehicleState};
