//! Fleet sweep and calibration.
//!
//! ```text
//! cargo run --release --example calibrate_fleet -- report [us06|hd]
//! cargo run --release --example calibrate_fleet -- fit
//! ```
//!
//! `report` runs every built-in vehicle behind the Civic Si leader in all
//! three modes and prints peaks. `fit` searches per-vehicle
//! `cg_height_ratio` (against the manual-mode peak deceleration targets) and
//! passenger-car peak torque (against the peak acceleration targets),
//! alternating until both settle, then prints the constants to paste into
//! `fleet/builtin.rs`.

use std::time::Instant;

use longsim::fleet::builtin::passenger_torque_map;
use longsim::fleet::{load_builtin_drivers, load_builtin_fleet};
use longsim::schedule::{parse_schedule, Schedule, SpeedUnits};
use longsim::sim::{run, summarize, Scenario};
use longsim::{Capability, VehicleSpec};

const US06: &str = include_str!("../fixtures/us06.csv");
const HD: &str = include_str!("../fixtures/hd_udds_surrogate.csv");

/// Manual-mode peak d_max over US06, ft/s^2, by vehicle id.
const DECEL_TARGET: [f64; 14] = [
    25.6, 25.2, 25.1, 27.9, 26.1, 25.7, 26.8, 26.0, 25.4, 25.4, 26.2, 21.3, 20.0, 19.6,
];
/// Peak a_max, ft/s^2, by vehicle id.
const ACCEL_TARGET: [f64; 14] = [
    8.8, 8.4, 9.1, 6.7, 8.4, 9.1, 9.5, 8.5, 8.7, 9.0, 4.7, 7.0, 5.2, 5.0,
];

struct Peaks {
    a: f64,
    d: f64,
    gap: Option<f64>,
    collisions: usize,
    infeasible: usize,
}

fn simulate(
    schedule: &Schedule,
    leader: &VehicleSpec,
    follower: &VehicleSpec,
    mode: Capability,
) -> Peaks {
    let driver = load_builtin_drivers()[4];
    let sc = Scenario::leader_follower(
        schedule.clone(),
        leader.clone(),
        follower.clone(),
        driver,
        mode,
    );
    let trace = run(&sc).expect("scenario runs");
    let s = &summarize(&trace)[&1];
    Peaks {
        a: s.peak_a_max,
        d: s.peak_d_max,
        gap: s.peak_time_gap,
        collisions: s.collision_count,
        infeasible: s.infeasible_steps,
    }
}

fn report(schedule: &Schedule) {
    let fleet = load_builtin_fleet();
    let leader = &fleet[0];
    println!(
        "{:<28} {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6} | coll infeas",
        "vehicle", "a_man", "d_man", "T_man", "a_aut", "d_aut", "T_aut", "a_coo", "d_coo", "T_coo"
    );
    let start = Instant::now();
    for spec in &fleet {
        let mut line = format!("{:<28}", spec.name);
        let mut coll = 0;
        let mut inf = Vec::new();
        for mode in [
            Capability::Manual,
            Capability::Autonomous,
            Capability::Cooperative,
        ] {
            let p = simulate(schedule, leader, spec, mode);
            line += &format!(
                " {:>6.2} {:>6.2} {:>6} |",
                p.a,
                p.d,
                p.gap.map_or("-".into(), |g| format!("{g:.2}"))
            );
            coll += p.collisions;
            inf.push(p.infeasible);
        }
        println!("{line} {coll:>4} {inf:?}");
    }
    println!("elapsed {:.2?}", start.elapsed());
}

fn bisect(lo: f64, hi: f64, target: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn with_torque(spec: &VehicleSpec, peak: f64) -> VehicleSpec {
    let mut s = spec.clone();
    s.engine.torque_map = passenger_torque_map(s.engine.idle_speed, s.engine.max_speed, peak);
    s
}

fn fit(schedule: &Schedule) {
    let mut fleet = load_builtin_fleet();
    let mut torque: Vec<f64> = fleet
        .iter()
        .map(|s| s.engine.peak_torque().torque)
        .collect();
    for round in 0..4 {
        let leader = fleet[0].clone();
        for (i, spec) in fleet.clone().iter().enumerate() {
            let max_ratio = 0.999 * spec.height / spec.wheelbase();
            let cg = bisect(0.0, max_ratio.min(1.5), DECEL_TARGET[i], |c| {
                let mut s = spec.clone();
                s.cg_height_ratio = c;
                let lead = if i == 0 { s.clone() } else { leader.clone() };
                simulate(schedule, &lead, &s, Capability::Manual).d
            });
            fleet[i].cg_height_ratio = cg;
        }
        let leader = fleet[0].clone();
        for (i, spec) in fleet.clone().iter().enumerate() {
            if spec.fleet_type.is_truck() {
                continue;
            }
            let m = bisect(50.0, 1500.0, ACCEL_TARGET[i], |m| {
                let s = with_torque(spec, m);
                let lead = if i == 0 { s.clone() } else { leader.clone() };
                simulate(schedule, &lead, &s, Capability::Manual).a
            });
            torque[i] = m;
            fleet[i] = with_torque(spec, m);
        }
        println!("round {round}");
        for (i, s) in fleet.iter().enumerate() {
            let leader = if i == 0 { s.clone() } else { fleet[0].clone() };
            let p = simulate(schedule, &leader, s, Capability::Manual);
            println!(
                "  {:>2} {:<28} cg {:.4} torque {:>7.2}  d {:.2} ({:.1})  a {:.2} ({:.1})",
                s.id,
                s.name,
                s.cg_height_ratio,
                torque[i],
                p.d,
                DECEL_TARGET[i],
                p.a,
                ACCEL_TARGET[i]
            );
        }
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let us06 = parse_schedule(US06, SpeedUnits::Mph, "US06").unwrap();
    let hd = parse_schedule(HD, SpeedUnits::Mph, "HD-UDDS").unwrap();
    match args.first().map(String::as_str) {
        Some("fit") => fit(&us06),
        Some("trace") => {
            let id: usize = args[1].parse().unwrap();
            let mode = match args[2].as_str() {
                "manual" => Capability::Manual,
                "autonomous" => Capability::Autonomous,
                _ => Capability::Cooperative,
            };
            let fleet = load_builtin_fleet();
            let driver = load_builtin_drivers()[4];
            let sc = Scenario::leader_follower(
                us06,
                fleet[0].clone(),
                fleet[id - 1].clone(),
                driver,
                mode,
            );
            let trace = run(&sc).unwrap();
            print!("{}", longsim::sim::trace_csv_string(&trace));
        }
        Some("report") if args.get(1).map(String::as_str) == Some("hd") => report(&hd),
        _ => report(&us06),
    }
}
