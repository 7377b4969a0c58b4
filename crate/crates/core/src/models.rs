//! Longitudinal control laws: the human-driver IIDM variant, cruise P,
//! ACC-style PD and CACC-style PID control, and mode arbitration.

use serde::{Deserialize, Serialize};

use crate::control::{tune_gains, TuneInput};
use crate::fleet::DriverType;
use crate::units::FT_PER_M;

/// Standstill spacing, ft.
pub const STANDSTILL_GAP: f64 = 5.0;
/// 300 m sensor range.
pub const DEFAULT_DETECTION_RANGE: f64 = 300.0 * FT_PER_M;
pub const DEFAULT_FREE_FLOW_SPEED: f64 = 110.0;
pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_BETA: f64 = 4.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("non-positive gap {0} ft")]
    NonPositiveGap(f64),
}

/// Controller coefficients. Units: K_p1..K_p3 1/s, K_i1 1/s², K_d1 and
/// K_d2 dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSet {
    pub kp1: f64,
    pub kp2: f64,
    pub kp3: f64,
    pub ki1: f64,
    pub kd1: f64,
    pub kd2: f64,
    #[serde(skip)]
    pub infeasible: bool,
}

impl Default for GainSet {
    fn default() -> Self {
        GainSet {
            kp1: 1.0,
            kp2: -1.0,
            kp3: 1.0,
            ki1: -1.0,
            kd1: 1.0,
            kd2: 1.0,
            infeasible: false,
        }
    }
}

impl GainSet {
    pub const MAX_MAGNITUDE: f64 = 100.0;

    pub fn validate(&self) -> Result<(), String> {
        let all = [self.kp1, self.kp2, self.kp3, self.ki1, self.kd1, self.kd2];
        if all
            .iter()
            .any(|g| !g.is_finite() || g.abs() > Self::MAX_MAGNITUDE)
        {
            return Err(format!(
                "gains must be finite with magnitude <= {}",
                Self::MAX_MAGNITUDE
            ));
        }
        if self.kd1 < 0.0 || self.kd2 < 0.0 {
            return Err("derivative gains must be non-negative".into());
        }
        Ok(())
    }

    /// Applies the per-step tuner to the gains that drive `law`. ACC tunes
    /// (|K_p2|, K_d1) and keeps the sign of K_p2; CACC tunes (K_p3, K_d2).
    pub fn tuned_for(&self, law: Law, input: TuneInput) -> GainSet {
        let mut out = *self;
        match law {
            Law::Acc => {
                let t = tune_gains(self.kp2.abs(), self.kd1, input);
                out.kp2 = t.kp.copysign(self.kp2);
                out.kd1 = t.kd;
                out.infeasible = t.infeasible;
            }
            Law::Cacc => {
                let t = tune_gains(self.kp3, self.kd2, input);
                out.kp3 = t.kp;
                out.kd2 = t.kd;
                out.infeasible = t.infeasible;
            }
            Law::Schedule | Law::Manual | Law::Cruise => {}
        }
        out
    }

    /// (kp, ki, kd) that drive `law`, as recorded in traces.
    pub fn active(&self, law: Law) -> (Option<f64>, Option<f64>, Option<f64>) {
        match law {
            Law::Schedule | Law::Cruise => (Some(self.kp1), None, None),
            Law::Acc => (Some(self.kp2), None, Some(self.kd1)),
            Law::Cacc => (Some(self.kp3), Some(self.ki1), Some(self.kd2)),
            Law::Manual => (None, None, None),
        }
    }
}

/// What a vehicle is equipped to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    Manual,
    Autonomous,
    Cooperative,
}

impl Capability {
    pub fn as_str(self) -> &'static str {
        match self {
            Capability::Manual => "manual",
            Capability::Autonomous => "autonomous",
            Capability::Cooperative => "cooperative",
        }
    }

    /// Sensing delay τ_s, s.
    pub fn default_sensing_delay(self) -> f64 {
        match self {
            Capability::Manual => 1.0,
            Capability::Autonomous => 0.6,
            Capability::Cooperative => 0.0,
        }
    }

    /// Set time gap, s. Manual drivers have none.
    pub fn default_time_gap(self) -> Option<f64> {
        match self {
            Capability::Manual => None,
            Capability::Autonomous => Some(1.1),
            Capability::Cooperative => Some(0.6),
        }
    }
}

/// The law actually applied at a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    /// Leader tracking its schedule.
    Schedule,
    Manual,
    Cruise,
    Acc,
    Cacc,
}

impl Law {
    pub fn as_str(self) -> &'static str {
        match self {
            Law::Schedule => "schedule",
            Law::Manual => "manual",
            Law::Cruise => "cruise",
            Law::Acc => "acc",
            Law::Cacc => "cacc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub a_max: f64,
    pub d_max: f64,
}

impl Bounds {
    pub fn clamp(&self, a: f64) -> f64 {
        a.clamp(-self.d_max, self.a_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlContext {
    pub free_flow_speed: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ControlContext {
    fn default() -> Self {
        ControlContext {
            free_flow_speed: DEFAULT_FREE_FLOW_SPEED,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

/// Human driver. The speed coefficient uses the leader's speed.
pub fn iidm_accel(
    driver: &DriverType,
    bounds: Bounds,
    gap: f64,
    s_min: f64,
    v_leader: f64,
    ctx: &ControlContext,
) -> Result<f64, ModelError> {
    if !(gap > 0.0) {
        return Err(ModelError::NonPositiveGap(gap));
    }
    let a = if gap >= s_min {
        let c_s = 1.0 - (s_min.max(0.0) / gap).powf(ctx.alpha);
        let c_v = 1.0 - (v_leader / (driver.speed_multiplier * ctx.free_flow_speed)).powf(ctx.beta);
        driver.acceleration_multiplier * bounds.a_max * c_s * c_v
    } else {
        -driver.deceleration_multiplier * bounds.d_max
    };
    Ok(bounds.clamp(a))
}

/// P control toward `target` speed (the free-flow speed for followers, the
/// schedule speed for the leader).
pub fn cruise_accel(kp1: f64, v: f64, target: f64, bounds: Bounds) -> f64 {
    bounds.clamp(kp1 * (target - v))
}

pub fn desired_gap(t_set: f64, t_min_prev: f64, v_prev: f64) -> f64 {
    (t_set.max(t_min_prev) * v_prev).max(STANDSTILL_GAP)
}

pub fn acc_accel(
    g: &GainSet,
    gap: f64,
    desired: f64,
    v_self: f64,
    v_leader: f64,
    bounds: Bounds,
) -> f64 {
    bounds.clamp(g.kp2 * (desired - gap) + g.kd1 * (v_leader - v_self))
}

pub fn cacc_accel(
    g: &GainSet,
    gap: f64,
    desired: f64,
    v_self: f64,
    v_leader: f64,
    a_leader: f64,
    bounds: Bounds,
) -> f64 {
    bounds.clamp(g.kp3 * (v_leader - v_self) + g.ki1 * (desired - gap) + g.kd2 * a_leader)
}

/// Sensor and V2V gaps disagree by more than 10% of the sensor gap or 3 ft,
/// whichever is larger.
pub fn gap_discrepancy(sensor_gap: f64, v2v_gap: f64) -> bool {
    (sensor_gap - v2v_gap).abs() > (0.1 * sensor_gap.abs()).max(3.0)
}

pub fn select_control_mode(
    subject: Capability,
    leader: Option<Capability>,
    gap: f64,
    discrepancy: bool,
    range: f64,
) -> Law {
    if subject == Capability::Manual {
        return Law::Manual;
    }
    match leader {
        Some(_) if gap > range => Law::Cruise,
        None => Law::Cruise,
        Some(Capability::Cooperative) if subject == Capability::Cooperative && !discrepancy => {
            Law::Cacc
        }
        Some(_) => Law::Acc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manual_always_manual() {
        assert_eq!(
            select_control_mode(
                Capability::Manual,
                Some(Capability::Cooperative),
                10.0,
                false,
                984.0
            ),
            Law::Manual
        );
        assert_eq!(
            select_control_mode(Capability::Manual, None, 0.0, false, 984.0),
            Law::Manual
        );
    }

    #[test]
    fn discrepancy_falls_back_to_acc() {
        assert_eq!(
            select_control_mode(
                Capability::Cooperative,
                Some(Capability::Cooperative),
                50.0,
                true,
                984.0
            ),
            Law::Acc
        );
        assert!(gap_discrepancy(100.0, 111.0));
        assert!(!gap_discrepancy(100.0, 109.0));
        assert!(gap_discrepancy(10.0, 13.5));
        assert!(!gap_discrepancy(10.0, 12.5));
    }

    #[test]
    fn acc_tuning_keeps_kp2_sign() {
        let g = GainSet::default().tuned_for(
            Law::Acc,
            TuneInput {
                t_min: 2.0,
                tau_lag: 0.2,
                v_leader: 0.0,
                s_min: 10.0,
                phase: crate::control::Phase::Decelerating,
            },
        );
        assert_eq!(g.kp2, -1.0);
        assert!((g.kd1 - 0.225).abs() < 1e-12);
    }

    #[test]
    fn detection_range_in_feet() {
        assert!((DEFAULT_DETECTION_RANGE - 984.252).abs() < 1e-3);
    }
}
