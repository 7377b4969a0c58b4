use serde::{Deserialize, Serialize};

use crate::dynamics::Environment;
use crate::fleet::{DriverType, VehicleSpec};
use crate::models::{Capability, ControlContext, GainSet, DEFAULT_DETECTION_RANGE};
use crate::schedule::Schedule;

/// Driver type used when none is given.
pub const DEFAULT_DRIVER_ID: u32 = 5;
pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_COMMUNICATION_DELAY: f64 = 0.1;
pub const DEFAULT_LEADER_POSITION: f64 = 100.0;
pub const DEFAULT_FRONT_SPACING: f64 = 100.0;
pub const DEFAULT_TRANSIENT_EXCLUSION: f64 = 30.0;
/// Below this follower speed the time gap `S / v` is not counted toward
/// its peak, ft/s.
pub const DEFAULT_TIME_GAP_MIN_SPEED: f64 = 10.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("dt must be positive")]
    NonPositiveDt,
    #[error("scenario has no vehicles")]
    NoVehicles,
    #[error("string position {index} overlaps the vehicle ahead (gap {gap:.3} ft)")]
    Overlap { index: usize, gap: f64 },
    #[error("environment: {0}")]
    Environment(String),
    #[error("string position {index}: {message}")]
    Vehicle { index: usize, message: String },
    #[error("gains: {0}")]
    Gains(String),
    #[error("{0}")]
    Control(String),
}

/// How followers are laid out behind the leader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// Front bumper to front bumper, ft.
    FrontSpacing(f64),
    /// Rear bumper of the vehicle ahead to front bumper, ft.
    BumperGap(f64),
}

impl Default for Placement {
    fn default() -> Self {
        Placement::FrontSpacing(DEFAULT_FRONT_SPACING)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CollisionPolicy {
    #[default]
    Halt,
    Continue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleEntry {
    pub spec: VehicleSpec,
    pub driver: DriverType,
    pub capability: Capability,
    /// Sensing delay τ_s, s.
    pub sensing_delay: f64,
    /// Communication delay τ_c, s.
    pub communication_delay: f64,
    /// Set time gap; unused by manual drivers.
    pub time_gap: f64,
    pub initial_speed: f64,
}

impl VehicleEntry {
    /// Entry with the per-capability default delays and time gap.
    pub fn new(spec: VehicleSpec, driver: DriverType, capability: Capability) -> Self {
        VehicleEntry {
            spec,
            driver,
            capability,
            sensing_delay: capability.default_sensing_delay(),
            communication_delay: DEFAULT_COMMUNICATION_DELAY,
            time_gap: capability.default_time_gap().unwrap_or(0.0),
            initial_speed: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub schedule: Schedule,
    /// First entry is the leader.
    pub vehicles: Vec<VehicleEntry>,
    pub env: Environment,
    pub dt: f64,
    pub control: ControlContext,
    pub gains: GainSet,
    pub detection_range: f64,
    pub leader_position: f64,
    pub placement: Placement,
    pub collision_policy: CollisionPolicy,
    /// Start-up period ignored by time-gap peaks, s.
    pub transient_exclusion: f64,
    pub time_gap_min_speed: f64,
    /// Carried into outputs; the engine itself has no random component.
    pub seed: u64,
    /// Evaluate vehicles within a step on the rayon pool.
    pub parallel: bool,
}

impl Scenario {
    /// Defaults for everything but the schedule and the string.
    pub fn new(schedule: Schedule, vehicles: Vec<VehicleEntry>) -> Self {
        Scenario {
            schedule,
            vehicles,
            env: Environment::default(),
            dt: DEFAULT_DT,
            control: ControlContext::default(),
            gains: GainSet::default(),
            detection_range: DEFAULT_DETECTION_RANGE,
            leader_position: DEFAULT_LEADER_POSITION,
            placement: Placement::default(),
            collision_policy: CollisionPolicy::default(),
            transient_exclusion: DEFAULT_TRANSIENT_EXCLUSION,
            time_gap_min_speed: DEFAULT_TIME_GAP_MIN_SPEED,
            seed: 0,
            parallel: false,
        }
    }

    /// The two-vehicle test string: `leader` tracks the schedule and
    /// `follower` drives behind it, both with the same capability and the
    /// default driver type.
    pub fn leader_follower(
        schedule: Schedule,
        leader: VehicleSpec,
        follower: VehicleSpec,
        driver: DriverType,
        capability: Capability,
    ) -> Self {
        let vehicles = vec![
            VehicleEntry::new(leader, driver, capability),
            VehicleEntry::new(follower, driver, capability),
        ];
        Scenario::new(schedule, vehicles)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.dt > 0.0) {
            return Err(ScenarioError::NonPositiveDt);
        }
        if self.vehicles.is_empty() {
            return Err(ScenarioError::NoVehicles);
        }
        self.env.validate().map_err(ScenarioError::Environment)?;
        self.gains.validate().map_err(ScenarioError::Gains)?;
        let c = &self.control;
        if !(c.free_flow_speed > 0.0) {
            return Err(ScenarioError::Control(
                "free_flow_speed must be positive".into(),
            ));
        }
        if !(c.alpha >= 1.0 && c.beta >= 1.0) {
            return Err(ScenarioError::Control(
                "alpha and beta must be at least 1".into(),
            ));
        }
        if !(self.detection_range > 0.0) {
            return Err(ScenarioError::Control(
                "detection_range must be positive".into(),
            ));
        }
        for (index, e) in self.vehicles.iter().enumerate() {
            let bad = |message: String| ScenarioError::Vehicle { index, message };
            e.spec.validate().map_err(|err| bad(err.to_string()))?;
            e.driver.validate().map_err(|err| bad(err.to_string()))?;
            if !(e.sensing_delay >= 0.0 && e.communication_delay >= 0.0) {
                return Err(bad("delays must be non-negative".into()));
            }
            if e.capability != Capability::Manual && !(e.time_gap > 0.0) {
                return Err(bad("time_gap must be positive".into()));
            }
            if !(e.initial_speed >= 0.0) {
                return Err(bad("initial_speed must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Initial front-bumper positions, leader first.
    pub fn initial_positions(&self) -> Result<Vec<f64>, ScenarioError> {
        let mut xs = Vec::with_capacity(self.vehicles.len());
        let mut x = self.leader_position;
        xs.push(x);
        for index in 1..self.vehicles.len() {
            let ahead = self.vehicles[index - 1].spec.length;
            x = match self.placement {
                Placement::FrontSpacing(d) => x - d,
                Placement::BumperGap(g) => x - ahead - g,
            };
            let gap = xs[index - 1] - x - ahead;
            if !(gap > 0.0) {
                return Err(ScenarioError::Overlap { index, gap });
            }
            xs.push(x);
        }
        Ok(xs)
    }

    /// Number of integration steps; the trace holds one more record.
    pub fn step_count(&self) -> usize {
        (self.schedule.duration() / self.dt + 1e-9).floor() as usize
    }
}
