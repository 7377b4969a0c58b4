//! Per-timestep vehicle physics: resistances, gearing, tractive effort and
//! the acceleration / deceleration envelope, plus the minimum safe gaps
//! derived from it.

use serde::{Deserialize, Serialize};

use crate::fleet::{Drivetrain, VehicleSpec};
use crate::units::{fps_to_mph, horsepower, GRAVITY};

/// Largest |grade| for which `sin θ ≈ tan θ` is accepted.
pub const MAX_GRADE: f64 = 0.25;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("grade outside small-angle regime: {0} (need |G| < 0.25)")]
    GradeOutOfRange(f64),
    #[error("vehicle {0}: degenerate geometry (wheelbase <= adhesion x cg height)")]
    DegenerateGeometry(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Environment {
    /// slug/ft^3
    pub air_density: f64,
    /// Signed fraction, positive uphill.
    pub grade: f64,
    pub adhesion: f64,
    pub braking_efficiency: f64,
    pub brake_mass_factor: f64,
    pub gravity: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            air_density: 0.002378,
            grade: 0.0,
            adhesion: 1.0,
            braking_efficiency: 0.95,
            brake_mass_factor: 1.04,
            gravity: GRAVITY,
        }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.air_density > 0.0) {
            return Err("air_density must be positive".into());
        }
        if !(self.adhesion > 0.0 && self.adhesion <= 1.2) {
            return Err("adhesion must be in (0, 1.2]".into());
        }
        if !(self.braking_efficiency > 0.0 && self.braking_efficiency <= 1.0) {
            return Err("braking_efficiency must be in (0, 1]".into());
        }
        if !(self.brake_mass_factor >= 1.0) {
            return Err("brake_mass_factor must be at least 1".into());
        }
        if !(self.gravity > 0.0) {
            return Err("gravity must be positive".into());
        }
        if !(self.grade.abs() < MAX_GRADE) {
            return Err(DynamicsError::GradeOutOfRange(self.grade).to_string());
        }
        Ok(())
    }
}

/// Everything the controllers need from the physics at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DynamicsOutput {
    pub a_max: f64,
    pub d_max: f64,
    /// Governing tractive effort, `min(f_max, f_engine)`.
    pub tractive_effort: f64,
    pub f_max: f64,
    pub f_engine: f64,
    pub resistance: f64,
    pub braking_force: f64,
    pub gear: usize,
    pub engine_speed: f64,
    pub engine_power: f64,
    pub mass_factor: f64,
    /// `v / d_max`
    pub tau_lag: f64,
}

fn mass(spec: &VehicleSpec, env: &Environment) -> f64 {
    spec.weight / env.gravity
}

pub fn aerodynamic_resistance(spec: &VehicleSpec, env: &Environment, v: f64) -> f64 {
    env.air_density * spec.drag_coefficient * spec.frontal_area() * v * v / 2.0
}

/// Rolling resistance coefficient `0.01 (1 + v/147)`.
pub fn rolling_coefficient(v: f64) -> f64 {
    0.01 * (1.0 + v / 147.0)
}

pub fn rolling_resistance(spec: &VehicleSpec, v: f64) -> f64 {
    rolling_coefficient(v) * spec.weight
}

pub fn grade_resistance(spec: &VehicleSpec, env: &Environment) -> Result<f64, DynamicsError> {
    if !(env.grade.abs() < MAX_GRADE) {
        return Err(DynamicsError::GradeOutOfRange(env.grade));
    }
    Ok(spec.weight * env.grade)
}

pub fn total_resistance(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
) -> Result<f64, DynamicsError> {
    Ok(aerodynamic_resistance(spec, env, v)
        + rolling_resistance(spec, v)
        + grade_resistance(spec, env)?)
}

/// Hysteretic gear choice: climb while above the current gear's up-shift
/// speed, drop while below its down-shift speed, otherwise hold.
pub fn select_gear(spec: &VehicleSpec, v: f64, previous_gear: usize) -> usize {
    let gears = &spec.transmission.gears;
    let top = gears.len();
    let mph = fps_to_mph(v);
    let mut g = previous_gear.clamp(1, top);
    for _ in 0..2 * top {
        let gear = &gears[g - 1];
        if g < top && mph > gear.shift_up_speed {
            g += 1;
        } else if g > 1 && mph < gear.shift_down_speed {
            g -= 1;
        } else {
            break;
        }
    }
    g
}

/// Engine speed in revs/min, clamped to the engine's operating range.
pub fn engine_speed(spec: &VehicleSpec, v: f64, gear: usize) -> f64 {
    let eps0 = spec.transmission.overall_ratio(gear);
    let revs_per_s = v * eps0
        / (2.0
            * std::f64::consts::PI
            * spec.wheel_radius
            * (1.0 - spec.transmission.axle_slippage));
    (revs_per_s * 60.0).clamp(spec.engine.idle_speed, spec.engine.max_speed)
}

/// Horsepower at `rpm` revs/min and `torque` ft-lb.
pub fn engine_power(rpm: f64, torque: f64) -> f64 {
    horsepower(torque, rpm)
}

pub fn engine_tractive_effort(spec: &VehicleSpec, v: f64, gear: usize) -> f64 {
    let torque = spec.engine.torque_at(engine_speed(spec, v, gear));
    torque * spec.transmission.overall_ratio(gear) * spec.transmission.drivetrain_efficiency
        / spec.wheel_radius
}

/// Adhesion-limited tractive effort.
pub fn max_tractive_effort(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
) -> Result<f64, DynamicsError> {
    let mu = env.adhesion;
    let w = spec.weight;
    let f_rl = rolling_coefficient(v);
    let (l, h) = (spec.wheelbase(), spec.cg_height());
    match spec.drivetrain {
        Drivetrain::FrontWheel => Ok(mu * w * (spec.l_r() + h * f_rl) / (l + mu * h)),
        Drivetrain::RearWheel => {
            if l <= mu * h {
                return Err(DynamicsError::DegenerateGeometry(spec.id));
            }
            Ok(mu * w * (spec.l_f() - h * f_rl) / (l - mu * h))
        }
        Drivetrain::AllWheel => Ok(mu * w),
    }
}

pub fn mass_factor(overall_ratio: f64) -> f64 {
    1.04 + 0.0025 * overall_ratio * overall_ratio
}

/// `a_max` in a given gear. Returns (a_max, f_max, f_engine, resistance).
pub fn max_acceleration_in_gear(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
    gear: usize,
) -> Result<(f64, f64, f64, f64), DynamicsError> {
    let f_max = max_tractive_effort(spec, env, v)?;
    let f_engine = engine_tractive_effort(spec, v, gear);
    let resistance = total_resistance(spec, env, v)?;
    let gamma = mass_factor(spec.transmission.overall_ratio(gear));
    let a = (f_max.min(f_engine) - resistance) / (mass(spec, env) * gamma);
    Ok((a.max(0.0), f_max, f_engine, resistance))
}

/// Maximum braking force; negative values from steep geometry are clamped to 0.
pub fn max_braking_force(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
) -> Result<f64, DynamicsError> {
    let mu = env.adhesion;
    let w = spec.weight;
    let f_rl = rolling_coefficient(v);
    let (l, h) = (spec.wheelbase(), spec.cg_height());
    let base = env.braking_efficiency * mu * w;
    let b = match spec.drivetrain {
        Drivetrain::FrontWheel => base * (spec.l_r() + h * (mu + f_rl)) / l,
        Drivetrain::RearWheel => {
            if l <= mu * h {
                return Err(DynamicsError::DegenerateGeometry(spec.id));
            }
            base * (spec.l_f() - h * (mu + f_rl)) / l
        }
        Drivetrain::AllWheel => base,
    };
    Ok(b.max(0.0))
}

/// Floor that keeps `d_max` strictly positive on steep downgrades.
const MIN_DECELERATION: f64 = 1e-3;

/// Maximum deceleration in ft/s^2 (positive number).
pub fn max_deceleration(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
) -> Result<f64, DynamicsError> {
    let b = max_braking_force(spec, env, v)?;
    let resistance = total_resistance(spec, env, v)?;
    let d = (b + resistance) / (mass(spec, env) * env.brake_mass_factor);
    Ok(d.max(MIN_DECELERATION))
}

/// Full envelope at speed `v`, selecting the gear from `previous_gear`.
pub fn evaluate(
    spec: &VehicleSpec,
    env: &Environment,
    v: f64,
    previous_gear: usize,
) -> Result<DynamicsOutput, DynamicsError> {
    let gear = select_gear(spec, v, previous_gear);
    let (a_max, f_max, f_engine, resistance) = max_acceleration_in_gear(spec, env, v, gear)?;
    let braking_force = max_braking_force(spec, env, v)?;
    let d_max = max_deceleration(spec, env, v)?;
    let rpm = engine_speed(spec, v, gear);
    Ok(DynamicsOutput {
        a_max,
        d_max,
        tractive_effort: f_max.min(f_engine),
        f_max,
        f_engine,
        resistance,
        braking_force,
        gear,
        engine_speed: rpm,
        engine_power: engine_power(rpm, spec.engine.torque_at(rpm)),
        mass_factor: mass_factor(spec.transmission.overall_ratio(gear)),
        tau_lag: v / d_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerTiming {
    pub v: f64,
    /// Perception-reaction (sensing) delay.
    pub tau_s: f64,
    /// Communication / actuation delay.
    pub tau_c: f64,
    pub tau_lag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderTiming {
    pub v: f64,
    pub tau_lag: f64,
}

/// Minimum bumper-to-bumper gap, ft. May be negative; callers clamp.
pub fn min_safe_distance_gap(follower: FollowerTiming, leader: LeaderTiming) -> f64 {
    (follower.tau_s + follower.tau_c + follower.tau_lag / 2.0) * follower.v
        - leader.tau_lag * leader.v / 2.0
}

/// Minimum time gap, s. May be negative; callers clamp.
pub fn min_safe_time_gap(follower: FollowerTiming, leader: LeaderTiming) -> f64 {
    follower.tau_s + follower.tau_c + follower.tau_lag - leader.tau_lag
}
