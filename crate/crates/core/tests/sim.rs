use std::path::PathBuf;

use longsim::fleet::load_builtin_drivers;
use longsim::models::STANDSTILL_GAP;
use longsim::schedule::{parse_schedule, Sample};
use longsim::sim::{
    advance, init_string, run_on_threads, step, trace_csv_string, CollisionPolicy, Placement,
    FLAG_COLLISION,
};
use longsim::{
    run, summarize, Capability, Fleet, Law, Scenario, Schedule, SpeedUnits, VehicleEntry,
};
use proptest::prelude::*;

fn us06() -> Schedule {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/us06.csv");
    parse_schedule(
        &std::fs::read_to_string(p).unwrap(),
        SpeedUnits::Mph,
        "us06",
    )
    .unwrap()
}

fn flat(v: f64, duration: f64) -> Schedule {
    Schedule::new(
        "flat",
        vec![Sample { t: 0.0, v }, Sample { t: duration, v }],
        SpeedUnits::Fps,
    )
    .unwrap()
}

fn pair(schedule: Schedule, follower: u32, cap: Capability) -> Scenario {
    let f = Fleet::builtin();
    let driver = *f.driver(5).unwrap();
    Scenario::leader_follower(
        schedule,
        f.vehicle(1).unwrap().clone(),
        f.vehicle(follower).unwrap().clone(),
        driver,
        cap,
    )
}

fn string_of(ids: &[u32], cap: Capability, schedule: Schedule) -> Scenario {
    let f = Fleet::builtin();
    let driver = *f.driver(5).unwrap();
    let entries = ids
        .iter()
        .map(|&id| VehicleEntry::new(f.vehicle(id).unwrap().clone(), driver, cap))
        .collect();
    Scenario::new(schedule, entries)
}

#[test]
fn default_pair_positions() {
    let sc = pair(flat(0.0, 10.0), 14, Capability::Manual);
    let s = init_string(&sc).unwrap();
    assert_eq!((s[0].x, s[1].x), (100.0, 0.0));
    assert!(s.iter().all(|v| v.v == 0.0 && v.a == 0.0 && v.gear == 1));
}

#[test]
fn single_vehicle_string() {
    let sc = string_of(&[1], Capability::Autonomous, flat(0.0, 5.0));
    let s = init_string(&sc).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].law, Law::Schedule);
}

#[test]
fn bumper_gap_placement() {
    let mut sc = string_of(&[1, 7, 12], Capability::Manual, flat(0.0, 5.0));
    sc.placement = Placement::BumperGap(100.0);
    sc.leader_position = 200.0;
    let x = init_string(&sc)
        .unwrap()
        .iter()
        .map(|s| s.x)
        .collect::<Vec<_>>();
    let len = |i: usize| sc.vehicles[i].spec.length;
    assert_eq!(x[0], 200.0);
    assert!((x[1] - (100.0 - len(0))).abs() < 1e-12);
    for i in 1..3 {
        assert!((x[i - 1] - x[i] - len(i - 1) - 100.0).abs() < 1e-9);
    }
}

#[test]
fn overlapping_placement_is_rejected() {
    let mut sc = string_of(&[1, 14], Capability::Manual, flat(0.0, 5.0));
    sc.placement = Placement::FrontSpacing(10.0);
    assert!(init_string(&sc)
        .unwrap_err()
        .to_string()
        .contains("overlaps"));
}

#[test]
fn rest_is_a_fixed_point() {
    // At standstill spacing every law commands zero; wider spacing makes
    // followers creep up to it.
    for cap in [
        Capability::Manual,
        Capability::Autonomous,
        Capability::Cooperative,
    ] {
        let mut sc = string_of(&[1, 3, 9, 13], cap, flat(0.0, 20.0));
        sc.placement = Placement::BumperGap(STANDSTILL_GAP);
        check_fixed_point(&sc);
    }
}

fn check_fixed_point(sc: &Scenario) {
    let sc = sc.clone();
    let init = init_string(&sc).unwrap();
    let tr = run(&sc).unwrap();
    for states in &tr.steps {
        for (s, s0) in states.iter().zip(&init) {
            assert_eq!((s.x, s.v, s.a), (s0.x, 0.0, 0.0));
        }
    }
    assert!(tr.collisions.is_empty());
}

#[test]
fn wide_standstill_spacing_closes_up() {
    let mut sc = pair(flat(0.0, 60.0), 3, Capability::Autonomous);
    sc.placement = Placement::BumperGap(80.0);
    let tr = run(&sc).unwrap();
    let last = tr.steps.last().unwrap()[1];
    // PD overshoot leaves it a little inside the standstill gap.
    assert!(last.gap.unwrap() > 0.0 && last.gap.unwrap() < STANDSTILL_GAP);
    assert_eq!(last.v, 0.0);
    assert!(tr.collisions.is_empty());
}

#[test]
fn leader_command_is_clamped() {
    let sc = string_of(&[1], Capability::Autonomous, flat(10.0, 10.0));
    let s = init_string(&sc).unwrap();
    let (decided, next) = step(&s, &sc, 0).unwrap();
    let a_max = decided[0].dynamics.a_max;
    assert!(a_max < 10.0);
    assert_eq!(decided[0].a, a_max);
    assert_eq!(next[0].v, a_max * sc.dt);
}

#[test]
fn discrete_update() {
    let sc = string_of(&[1], Capability::Autonomous, flat(0.0, 1.0));
    let mut s = init_string(&sc).unwrap();
    s[0].x = 50.0;
    s[0].v = 20.0;
    s[0].a = 3.0;
    let next = advance(&mut s, 0.1);
    assert_eq!(next[0].v, 20.3);
    assert!((next[0].x - (50.0 + 2.0 + 0.015)).abs() < 1e-12);
    assert_eq!(next[0].prev_v, 20.0);
}

#[test]
fn stopping_never_reverses() {
    let sc = string_of(&[1], Capability::Autonomous, flat(0.0, 1.0));
    let mut s = init_string(&sc).unwrap();
    s[0].v = 1.0;
    s[0].a = -20.0;
    let next = advance(&mut s, 0.1);
    assert_eq!(next[0].v, 0.0);
    assert_eq!(s[0].a, -10.0);
}

#[test]
fn us06_record_count() {
    let tr = run(&pair(us06(), 14, Capability::Manual)).unwrap();
    assert_eq!(tr.steps.len(), 5961);
    assert_eq!(tr.times.len(), 5961);
    assert!((tr.times[5960] - 596.0).abs() < 1e-9);
    assert!(tr.collisions.is_empty() && !tr.halted);
}

#[test]
fn zero_length_schedule() {
    let s = Schedule::new("z", vec![Sample { t: 0.0, v: 0.0 }], SpeedUnits::Fps).unwrap();
    let sc = pair(s, 3, Capability::Autonomous);
    let tr = run(&sc).unwrap();
    assert_eq!(tr.steps.len(), 1);
    let init = init_string(&sc).unwrap();
    assert_eq!(tr.steps[0][1].x, init[1].x);
}

#[test]
fn deterministic_and_thread_independent() {
    let sc = string_of(&[1, 5, 11, 14], Capability::Cooperative, us06());
    let a = trace_csv_string(&run(&sc).unwrap());
    let b = trace_csv_string(&run(&sc).unwrap());
    let c = trace_csv_string(&run_on_threads(&sc, 4).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn us06_kinematics_and_bounds() {
    for cap in [
        Capability::Manual,
        Capability::Autonomous,
        Capability::Cooperative,
    ] {
        let sc = pair(us06(), 12, cap);
        let tr = run(&sc).unwrap();
        let dt = sc.dt;
        for k in 0..tr.steps.len() - 1 {
            for i in 0..2 {
                let (s, n) = (&tr.steps[k][i], &tr.steps[k + 1][i]);
                assert!(
                    s.a <= s.dynamics.a_max && s.a >= -s.dynamics.d_max,
                    "{cap:?} k={k} i={i}"
                );
                assert_eq!(n.v, s.v + s.a * dt);
                assert_eq!(n.x, s.x + s.v * dt + s.a * dt * dt / 2.0);
                assert!(n.v >= 0.0);
            }
            assert!(tr.steps[k + 1][1].gap.unwrap() > 0.0);
        }
    }
}

#[test]
fn capability_sets_the_law() {
    let tr = run(&pair(us06(), 2, Capability::Cooperative)).unwrap();
    assert!(tr.steps.iter().skip(1).all(|s| s[1].law == Law::Cacc));
    let tr = run(&pair(us06(), 2, Capability::Autonomous)).unwrap();
    assert!(tr.steps.iter().skip(1).all(|s| s[1].law == Law::Acc));
    let tr = run(&pair(us06(), 2, Capability::Manual)).unwrap();
    assert!(tr.steps.iter().all(|s| s[1].law == Law::Manual));
}

#[test]
fn far_leader_means_cruise() {
    let mut sc = pair(flat(0.0, 3.0), 2, Capability::Autonomous);
    sc.placement = Placement::FrontSpacing(2000.0);
    let tr = run(&sc).unwrap();
    assert_eq!(tr.steps[0][1].law, Law::Cruise);
    assert!(tr.steps[0][1].a > 0.0);
}

#[test]
fn stationary_summary_is_zero() {
    let mut sc = string_of(&[1, 6, 14], Capability::Manual, flat(0.0, 60.0));
    sc.placement = Placement::BumperGap(STANDSTILL_GAP);
    let tr = run(&sc).unwrap();
    for s in summarize(&tr).values() {
        assert_eq!((s.peak_a_max, s.peak_d_max), (0.0, 0.0));
        assert_eq!(s.peak_time_gap, None);
        assert_eq!(s.collision_count, 0);
    }
}

#[test]
fn autonomous_and_cooperative_peaks() {
    // The leader's law ignores capability, so its peaks match exactly. The
    // follower's envelope is evaluated along different speed profiles and
    // only matches closely.
    for id in [4, 13] {
        let auto = summarize(&run(&pair(us06(), id, Capability::Autonomous)).unwrap());
        let coop = summarize(&run(&pair(us06(), id, Capability::Cooperative)).unwrap());
        assert_eq!(auto[&0].peak_a_max, coop[&0].peak_a_max);
        assert_eq!(auto[&0].peak_d_max, coop[&0].peak_d_max);
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(auto[&1].peak_a_max, coop[&1].peak_a_max) < 0.01);
        assert!(rel(auto[&1].peak_d_max, coop[&1].peak_d_max) < 0.01);
    }
}

#[test]
fn collision_halts_by_default() {
    let f = Fleet::builtin();
    let driver = *f.driver(5).unwrap();
    let mut lead = VehicleEntry::new(
        f.vehicle(1).unwrap().clone(),
        driver,
        Capability::Autonomous,
    );
    lead.initial_speed = 80.0;
    let mut tail = VehicleEntry::new(
        f.vehicle(14).unwrap().clone(),
        driver,
        Capability::Autonomous,
    );
    tail.initial_speed = 80.0;
    tail.sensing_delay = 1.0;
    tail.time_gap = 0.01;
    let mut sc = Scenario::new(flat(0.0, 20.0), vec![lead, tail]);
    sc.placement = Placement::BumperGap(5.0);
    let halted = run(&sc).unwrap();
    assert!(halted.halted);
    assert!(!halted.collisions.is_empty());
    assert!(halted.steps.last().unwrap()[1].flag & FLAG_COLLISION != 0);
    assert!(halted.steps.len() < 201);

    sc.collision_policy = CollisionPolicy::Continue;
    let cont = run(&sc).unwrap();
    assert_eq!(cont.steps.len(), 201);
    assert!(!cont.halted);
    assert_eq!(summarize(&cont)[&1].collision_count, cont.collisions.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_strings_respect_bounds(
        ids in prop::collection::vec(1u32..=14, 2..4),
        cap in prop::sample::select(vec![Capability::Manual, Capability::Autonomous, Capability::Cooperative]),
        v in 0.0f64..100.0,
        driver in 1usize..=10,
    ) {
        let mut sc = string_of(&ids, cap, flat(v, 40.0));
        let d = load_builtin_drivers()[driver - 1];
        for e in &mut sc.vehicles {
            e.driver = d;
        }
        let tr = run(&sc).unwrap();
        for states in &tr.steps {
            for s in states {
                prop_assert!(s.v >= 0.0);
                prop_assert!(s.a <= s.dynamics.a_max && s.a >= -s.dynamics.d_max);
            }
        }
        prop_assert_eq!(trace_csv_string(&tr), trace_csv_string(&run(&sc).unwrap()));
    }
}
