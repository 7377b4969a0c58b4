use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{CollisionPolicy, Scenario, ScenarioError, VehicleEntry};
use crate::control::{Phase, TuneInput};
use crate::dynamics::{self, DynamicsOutput, FollowerTiming, LeaderTiming};
use crate::models::{self, Bounds, Capability, GainSet, Law, STANDSTILL_GAP};

pub const FLAG_INFEASIBLE: u8 = 1;
pub const FLAG_COLLISION: u8 = 2;
/// An automated law was overridden by full braking because `S < S_min`.
pub const FLAG_EMERGENCY: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VehicleState {
    /// Front bumper, ft.
    pub x: f64,
    pub v: f64,
    /// Applied acceleration over the following step.
    pub a: f64,
    pub gear: usize,
    pub gains: GainSet,
    pub dynamics: DynamicsOutput,
    pub law: Law,
    /// Bumper-to-bumper gap to the vehicle ahead.
    pub gap: Option<f64>,
    pub time_gap: Option<f64>,
    pub s_min: Option<f64>,
    pub t_min: Option<f64>,
    pub desired_gap: Option<f64>,
    pub flag: u8,
    /// Speed and T_min from the previous step, for the desired gap.
    #[serde(skip)]
    pub prev_v: f64,
    #[serde(skip)]
    pub prev_t_min: f64,
}

impl VehicleState {
    fn at_rest(x: f64, v: f64, gear: usize, gains: GainSet, law: Law) -> Self {
        VehicleState {
            x,
            v,
            a: 0.0,
            gear,
            gains,
            dynamics: DynamicsOutput::default(),
            law,
            gap: None,
            time_gap: None,
            s_min: None,
            t_min: None,
            desired_gap: None,
            flag: 0,
            prev_v: v,
            prev_t_min: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEvent {
    pub step: usize,
    pub t: f64,
    /// String position of the follower that hit the vehicle ahead.
    pub vehicle: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleMeta {
    pub position: usize,
    pub spec_id: u32,
    pub name: String,
    pub capability: Capability,
    pub driver_id: u32,
}

/// Every vehicle's state at every recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dt: f64,
    pub vehicles: Vec<VehicleMeta>,
    pub times: Vec<f64>,
    /// `steps[k][i]`: vehicle `i` at `times[k]`.
    pub steps: Vec<Vec<VehicleState>>,
    /// Schedule speed at each recorded time.
    pub schedule_speed: Vec<f64>,
    pub collisions: Vec<CollisionEvent>,
    pub halted: bool,
    pub transient_exclusion: f64,
    pub time_gap_min_speed: f64,
}

impl Trace {
    pub fn vehicle_series(&self, i: usize) -> impl Iterator<Item = &VehicleState> + '_ {
        self.steps.iter().map(move |s| &s[i])
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("string position {index}: {source}")]
    Dynamics {
        index: usize,
        source: dynamics::DynamicsError,
    },
    #[error("thread pool: {0}")]
    Threads(String),
}

/// States at t = 0: positions from the placement rule, gear from the
/// initial speed, Table 2 gains.
pub fn init_string(sc: &Scenario) -> Result<Vec<VehicleState>, SimError> {
    sc.validate()?;
    let xs = sc.initial_positions()?;
    Ok(sc
        .vehicles
        .iter()
        .zip(xs)
        .enumerate()
        .map(|(i, (e, x))| {
            let gear = dynamics::select_gear(&e.spec, e.initial_speed, 1);
            let law = if i == 0 {
                Law::Schedule
            } else {
                initial_law(e)
            };
            VehicleState::at_rest(x, e.initial_speed, gear, sc.gains, law)
        })
        .collect())
}

fn initial_law(e: &VehicleEntry) -> Law {
    match e.capability {
        Capability::Manual => Law::Manual,
        _ => Law::Cruise,
    }
}

fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn gap_between(ahead: &VehicleState, ahead_entry: &VehicleEntry, behind: &VehicleState) -> f64 {
    ahead.x - behind.x - ahead_entry.spec.length
}

/// Fills in the decision fields (dynamics, law, gains, applied
/// acceleration) for step `k`. Reads only kinematics and previous-step
/// values, so vehicles are independent.
pub fn decide(
    states: &[VehicleState],
    sc: &Scenario,
    k: usize,
) -> Result<Vec<VehicleState>, SimError> {
    let t = k as f64 * sc.dt;
    let n = states.len();
    let dyns = map_indexed(n, sc.parallel, |i| {
        let e = &sc.vehicles[i];
        dynamics::evaluate(&e.spec, &sc.env, states[i].v, states[i].gear)
            .map_err(|source| SimError::Dynamics { index: i, source })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let target = sc
        .schedule
        .speed_at(t.min(sc.schedule.duration()))
        .unwrap_or(0.0);
    Ok(map_indexed(n, sc.parallel, |i| {
        let mut s = states[i];
        let dy = dyns[i];
        s.dynamics = dy;
        s.gear = dy.gear;
        s.flag = 0;
        s.gains = sc.gains;
        let bounds = Bounds {
            a_max: dy.a_max,
            d_max: dy.d_max,
        };
        if i == 0 {
            s.law = Law::Schedule;
            s.a = models::cruise_accel(sc.gains.kp1, s.v, target, bounds);
            return s;
        }
        follower_decision(s, &states[i - 1], &dyns[i - 1], i, sc, bounds)
    }))
}

fn follower_decision(
    mut s: VehicleState,
    ahead: &VehicleState,
    ahead_dyn: &DynamicsOutput,
    i: usize,
    sc: &Scenario,
    bounds: Bounds,
) -> VehicleState {
    let e = &sc.vehicles[i];
    let ahead_entry = &sc.vehicles[i - 1];
    let gap = gap_between(ahead, ahead_entry, &s);
    let follower = FollowerTiming {
        v: s.v,
        tau_s: e.sensing_delay,
        tau_c: e.communication_delay,
        tau_lag: s.dynamics.tau_lag,
    };
    let leader = LeaderTiming {
        v: ahead.v,
        tau_lag: ahead_dyn.tau_lag,
    };
    let s_min = dynamics::min_safe_distance_gap(follower, leader);
    let t_min = dynamics::min_safe_time_gap(follower, leader);
    s.gap = Some(gap);
    s.time_gap = (s.v > 0.0).then(|| gap / s.v);
    s.s_min = Some(s_min);
    s.t_min = Some(t_min);
    s.desired_gap = None;

    if !(gap > 0.0) {
        s.flag |= FLAG_COLLISION;
        s.law = initial_law(e);
        s.a = -bounds.d_max;
        return s;
    }

    s.law = models::select_control_mode(
        e.capability,
        Some(ahead_entry.capability),
        gap,
        // no sensor noise model: radar and V2V report the same gap
        models::gap_discrepancy(gap, gap),
        sc.detection_range,
    );
    s.a = match s.law {
        Law::Manual => models::iidm_accel(
            &e.driver,
            bounds,
            gap,
            s_min.max(STANDSTILL_GAP),
            ahead.v,
            &sc.control,
        )
        .expect("gap checked positive"),
        Law::Cruise | Law::Schedule => {
            models::cruise_accel(sc.gains.kp1, s.v, sc.control.free_flow_speed, bounds)
        }
        Law::Acc | Law::Cacc => {
            let desired = models::desired_gap(e.time_gap, s.prev_t_min, s.prev_v);
            s.desired_gap = Some(desired);
            let command = |g: &GainSet| match s.law {
                Law::Acc => models::acc_accel(g, gap, desired, s.v, ahead.v, bounds),
                _ => models::cacc_accel(g, gap, desired, s.v, ahead.v, ahead.a, bounds),
            };
            let provisional = command(&sc.gains);
            let tuned = sc.gains.tuned_for(
                s.law,
                TuneInput {
                    t_min,
                    tau_lag: s.dynamics.tau_lag,
                    v_leader: ahead.v,
                    s_min,
                    phase: Phase::from_command(provisional),
                },
            );
            s.gains = tuned;
            if tuned.infeasible {
                s.flag |= FLAG_INFEASIBLE;
            }
            if gap < s_min {
                s.flag |= FLAG_EMERGENCY;
                -bounds.d_max
            } else {
                command(&tuned)
            }
        }
    };
    s
}

/// Integrates decided states over one step. Speed never goes negative: a
/// command that would reverse the vehicle is replaced by the one that stops
/// it exactly at the end of the step.
pub fn advance(decided: &mut [VehicleState], dt: f64) -> Vec<VehicleState> {
    decided
        .iter_mut()
        .map(|s| {
            if s.v + s.a * dt < 0.0 {
                s.a = -s.v / dt;
            }
            let mut next = *s;
            next.x = s.x + s.v * dt + s.a * dt * dt / 2.0;
            next.v = (s.v + s.a * dt).max(0.0);
            next.prev_v = s.v;
            next.prev_t_min = s.t_min.unwrap_or(0.0);
            next
        })
        .collect()
}

/// One full step: decide at `k`, then integrate to `k + 1`. Returns the
/// recorded states at `k` and the kinematic states at `k + 1`.
pub fn step(
    states: &[VehicleState],
    sc: &Scenario,
    k: usize,
) -> Result<(Vec<VehicleState>, Vec<VehicleState>), SimError> {
    let mut decided = decide(states, sc, k)?;
    let next = advance(&mut decided, sc.dt);
    Ok((decided, next))
}

fn collisions_in(states: &[VehicleState], sc: &Scenario, k: usize) -> Vec<CollisionEvent> {
    (1..states.len())
        .filter_map(|i| {
            let gap = gap_between(&states[i - 1], &sc.vehicles[i - 1], &states[i]);
            (gap <= 0.0).then_some(CollisionEvent {
                step: k,
                t: k as f64 * sc.dt,
                vehicle: i,
                gap,
            })
        })
        .collect()
}

/// [`run`] with per-vehicle work spread over a dedicated pool of `threads`
/// workers. Output is identical to the sequential run.
pub fn run_on_threads(sc: &Scenario, threads: usize) -> Result<Trace, SimError> {
    if threads <= 1 {
        let mut seq = sc.clone();
        seq.parallel = false;
        return run(&seq);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::Threads(e.to_string()))?;
    let mut par = sc.clone();
    par.parallel = true;
    pool.install(|| run(&par))
}

pub fn run(sc: &Scenario) -> Result<Trace, SimError> {
    let mut states = init_string(sc)?;
    let n_steps = sc.step_count();
    let mut trace = Trace {
        dt: sc.dt,
        vehicles: sc
            .vehicles
            .iter()
            .enumerate()
            .map(|(position, e)| VehicleMeta {
                position,
                spec_id: e.spec.id,
                name: e.spec.name.clone(),
                capability: e.capability,
                driver_id: e.driver.id,
            })
            .collect(),
        times: Vec::with_capacity(n_steps + 1),
        steps: Vec::with_capacity(n_steps + 1),
        schedule_speed: Vec::with_capacity(n_steps + 1),
        collisions: collisions_in(&states, sc, 0),
        halted: false,
        transient_exclusion: sc.transient_exclusion,
        time_gap_min_speed: sc.time_gap_min_speed,
    };
    for k in 0..=n_steps {
        let t = k as f64 * sc.dt;
        let mut decided = decide(&states, sc, k)?;
        let next = advance(&mut decided, sc.dt);
        trace.times.push(t);
        trace.schedule_speed.push(
            sc.schedule
                .speed_at(t.min(sc.schedule.duration()))
                .unwrap_or(0.0),
        );
        trace.steps.push(decided);
        if k == n_steps {
            break;
        }
        let hits = collisions_in(&next, sc, k + 1);
        let hit = !hits.is_empty();
        trace.collisions.extend(hits);
        states = next;
        if hit && sc.collision_policy == CollisionPolicy::Halt {
            let last = decide(&states, sc, k + 1)?;
            let t_next = (k + 1) as f64 * sc.dt;
            trace.times.push(t_next);
            trace.schedule_speed.push(
                sc.schedule
                    .speed_at(t_next.min(sc.schedule.duration()))
                    .unwrap_or(0.0),
            );
            trace.steps.push(last);
            trace.halted = true;
            break;
        }
    }
    Ok(trace)
}
