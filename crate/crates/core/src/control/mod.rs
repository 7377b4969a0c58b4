//! Upper-level closed-loop analysis and per-step gain tuning.
//!
//! The plant is a first-order lag `1/(τ s + 1)` from desired to actual
//! acceleration, integrated once to speed; a PD controller closes the loop:
//!
//! ```text
//! H(s) = (K_p + K_d s) / (τ s² + (K_d + 1) s + K_p)
//! ```
//!
//! The closed forms in [`loop_metrics`] are those of the zero-free
//! second-order system `G(s) = K_p / (τ s² + (K_d + 1) s + K_p)`.

pub mod step;

use serde::Serialize;

pub use step::{
    simulate_full_loop_step, simulate_step_response, MeasuredStep, OracleError, StepTrace,
};

use std::f64::consts::PI;

/// Lowest proportional gain the tuner will back off to, 1/s.
pub const KP_FLOOR: f64 = 0.05;
pub const KD_FLOOR: f64 = 0.0;
/// Safety margin applied to the deceleration K_d bound.
pub const KD_MARGIN: f64 = 0.9;
/// Multiplicative back-off per acceleration-tuning iteration.
pub const BACKOFF: f64 = 0.8;
pub const MAX_BACKOFF_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopParams {
    pub kp: f64,
    pub kd: f64,
    pub tau_lag: f64,
}

impl LoopParams {
    /// `4 K_p τ − (K_d + 1)²`; positive means underdamped.
    pub fn discriminant(&self) -> f64 {
        4.0 * self.kp * self.tau_lag - (self.kd + 1.0).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    pub omega_n: f64,
    pub xi: f64,
    pub rise_time: f64,
    pub settling_time: f64,
    /// Peak overshoot as a fraction of the step; `None` unless underdamped.
    pub overshoot: Option<f64>,
    /// Time of the first peak; `None` unless underdamped.
    pub peak_time: Option<f64>,
}

impl StepMetrics {
    pub fn from_natural(omega_n: f64, xi: f64) -> Self {
        let underdamped = xi > 0.0 && xi < 1.0;
        let root = (1.0 - xi * xi).sqrt();
        StepMetrics {
            omega_n,
            xi,
            rise_time: PI / (2.0 * omega_n),
            settling_time: 4.0 / (xi * omega_n),
            overshoot: underdamped.then(|| (-PI * xi / root).exp()),
            peak_time: underdamped.then(|| PI / (omega_n * root)),
        }
    }

    /// `(T_c − T_r)(v_p − v_i)`, the overshoot-distance estimate.
    pub fn overshoot_distance(&self, v_leader: f64) -> Option<f64> {
        Some((self.peak_time? - self.rise_time) * (self.overshoot? - v_leader))
    }
}

pub fn natural_frequency(p: LoopParams) -> f64 {
    (p.kp / p.tau_lag).sqrt()
}

pub fn damping_ratio(p: LoopParams) -> f64 {
    (p.kd + 1.0) / (2.0 * (p.kp * p.tau_lag).sqrt())
}

pub fn loop_metrics(p: LoopParams) -> StepMetrics {
    StepMetrics::from_natural(natural_frequency(p), damping_ratio(p))
}

/// Strict upper bound on K_d while decelerating: `T_min / (8 τ) − 1`.
pub fn kd_bound_decel(t_min: f64, tau_lag: f64) -> f64 {
    t_min / (8.0 * tau_lag) - 1.0
}

/// Overshoot-distance condition for the accelerating phase, evaluated in
/// the closed algebraic form of the gains. Overdamped loops cannot
/// overshoot and always pass.
pub fn accel_constraint_ok(kp: f64, kd: f64, tau_lag: f64, v_leader: f64, s_min: f64) -> bool {
    let disc = LoopParams { kp, kd, tau_lag }.discriminant();
    if !(disc > 0.0) {
        return true;
    }
    let time_term = 2.0 * PI * tau_lag / disc.sqrt() - PI * (tau_lag / (4.0 * kp)).sqrt();
    let overshoot_term = (-PI * (kd + 1.0) / disc.sqrt()).exp() - v_leader;
    time_term * overshoot_term < s_min
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Accelerating,
    Decelerating,
    Cruising,
}

impl Phase {
    /// Threshold on the commanded acceleration, ft/s^2.
    pub const DEADBAND: f64 = 0.01;

    pub fn from_command(a: f64) -> Self {
        if a > Self::DEADBAND {
            Phase::Accelerating
        } else if a < -Self::DEADBAND {
            Phase::Decelerating
        } else {
            Phase::Cruising
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneInput {
    pub t_min: f64,
    pub tau_lag: f64,
    pub v_leader: f64,
    pub s_min: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned {
    pub kp: f64,
    pub kd: f64,
    /// A floor or the iteration cap was reached.
    pub infeasible: bool,
}

/// Pulls (K_p, K_d) toward the feasible set for the current phase. Gains
/// are only ever reduced.
pub fn tune_gains(kp: f64, kd: f64, input: TuneInput) -> Tuned {
    let mut out = Tuned {
        kp,
        kd,
        infeasible: false,
    };
    if !(input.tau_lag > 0.0) {
        return out;
    }
    match input.phase {
        Phase::Cruising => {}
        Phase::Decelerating => {
            let bound = kd_bound_decel(input.t_min, input.tau_lag);
            if bound > 0.0 {
                out.kd = kd.min(KD_MARGIN * bound).max(KD_FLOOR);
            } else {
                out.kd = KD_FLOOR.min(kd);
                out.infeasible = true;
            }
        }
        Phase::Accelerating => {
            let ok = |t: &Tuned| {
                accel_constraint_ok(t.kp, t.kd, input.tau_lag, input.v_leader, input.s_min)
            };
            let mut steps = 0;
            while !ok(&out) {
                if steps == MAX_BACKOFF_STEPS {
                    out.infeasible = true;
                    break;
                }
                let next_kp = out.kp * BACKOFF;
                if next_kp < KP_FLOOR {
                    out.kp = out.kp.min(KP_FLOOR);
                    out.kd *= BACKOFF;
                    out.infeasible = !ok(&out);
                    break;
                }
                out.kp = next_kp;
                out.kd *= BACKOFF;
                steps += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_boundary() {
        let p = LoopParams {
            kp: 1.0,
            kd: 1.0,
            tau_lag: 1.0,
        };
        assert_eq!(damping_ratio(p), 1.0);
        assert_eq!(loop_metrics(p).overshoot, None);
    }

    #[test]
    fn overshoot_vanishes_near_critical() {
        let m = StepMetrics::from_natural(1.0, 0.999_999);
        assert!(m.overshoot.unwrap() < 1e-6);
    }

    #[test]
    fn phase_deadband() {
        assert_eq!(Phase::from_command(0.005), Phase::Cruising);
        assert_eq!(Phase::from_command(0.02), Phase::Accelerating);
        assert_eq!(Phase::from_command(-0.02), Phase::Decelerating);
    }

    #[test]
    fn zero_lag_leaves_gains() {
        let t = tune_gains(
            1.0,
            1.0,
            TuneInput {
                t_min: 1.0,
                tau_lag: 0.0,
                v_leader: 0.0,
                s_min: 0.0,
                phase: Phase::Decelerating,
            },
        );
        assert_eq!((t.kp, t.kd, t.infeasible), (1.0, 1.0, false));
    }
}
