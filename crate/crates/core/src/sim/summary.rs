use std::collections::BTreeMap;

use serde::Serialize;

use super::engine::{Trace, FLAG_INFEASIBLE};
use crate::control::Phase;
use crate::models::Capability;

/// Speeds at or below this count as stopped, ft/s.
pub const STOPPED_SPEED: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleSummary {
    pub spec_id: u32,
    pub name: String,
    pub capability: Capability,
    pub peak_a_max: f64,
    pub peak_d_max: f64,
    /// `None` for the leader, or if no step qualified.
    pub peak_time_gap: Option<f64>,
    pub collision_count: usize,
    /// Against the vehicle ahead; the leader is compared with its schedule.
    pub speed_rmse_vs_leader: f64,
    pub infeasible_steps: usize,
}

/// Peaks per vehicle, keyed by string position.
///
/// `a_max` counts only while the vehicle moves and changes speed; `d_max`
/// only while it moves. Time gaps skip the start-up transient and slow
/// steps where `S / v` is dominated by the denominator.
pub fn summarize(trace: &Trace) -> BTreeMap<usize, VehicleSummary> {
    trace
        .vehicles
        .iter()
        .enumerate()
        .map(|(i, meta)| {
            let mut peak_a: f64 = 0.0;
            let mut peak_d: f64 = 0.0;
            let mut peak_gap: Option<f64> = None;
            let mut sq = 0.0;
            let mut infeasible = 0;
            for (k, s) in trace.vehicle_series(i).enumerate() {
                let moving = s.v > STOPPED_SPEED;
                if moving && s.a.abs() > Phase::DEADBAND {
                    peak_a = peak_a.max(s.dynamics.a_max);
                }
                if moving {
                    peak_d = peak_d.max(s.dynamics.d_max);
                }
                if trace.times[k] >= trace.transient_exclusion && s.v >= trace.time_gap_min_speed {
                    if let Some(g) = s.time_gap {
                        peak_gap = Some(peak_gap.map_or(g, |p: f64| p.max(g)));
                    }
                }
                let reference = if i == 0 {
                    trace.schedule_speed[k]
                } else {
                    trace.steps[k][i - 1].v
                };
                sq += (s.v - reference).powi(2);
                if s.flag & FLAG_INFEASIBLE != 0 {
                    infeasible += 1;
                }
            }
            let collision_count = trace.collisions.iter().filter(|c| c.vehicle == i).count();
            (
                i,
                VehicleSummary {
                    spec_id: meta.spec_id,
                    name: meta.name.clone(),
                    capability: meta.capability,
                    peak_a_max: peak_a,
                    peak_d_max: peak_d,
                    peak_time_gap: peak_gap,
                    collision_count,
                    speed_rmse_vs_leader: (sq / trace.steps.len() as f64).sqrt(),
                    infeasible_steps: infeasible,
                },
            )
        })
        .collect()
}
