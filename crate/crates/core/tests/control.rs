use std::f64::consts::PI;

use approx::assert_relative_eq;
use longsim::control::{
    accel_constraint_ok, kd_bound_decel, loop_metrics, simulate_full_loop_step,
    simulate_step_response, tune_gains, LoopParams, OracleError, Phase, TuneInput, KP_FLOOR,
    MAX_BACKOFF_STEPS,
};
use proptest::prelude::*;

/// Exact unit-step response of the underdamped standard second-order system.
fn analytic_step(omega_n: f64, xi: f64, t: f64) -> f64 {
    let root = (1.0 - xi * xi).sqrt();
    let wd = omega_n * root;
    1.0 - (-xi * omega_n * t).exp() * ((wd * t).cos() + xi / root * (wd * t).sin())
}

#[test]
#[allow(clippy::approx_constant)]
fn metrics_example() {
    let m = loop_metrics(LoopParams {
        kp: 4.0,
        kd: 1.0,
        tau_lag: 1.0,
    });
    assert_relative_eq!(m.omega_n, 2.0, max_relative = 1e-12);
    assert_relative_eq!(m.xi, 0.5, max_relative = 1e-12);
    assert_relative_eq!(m.rise_time, PI / 4.0, max_relative = 1e-12);
    assert!((m.rise_time - 0.7854).abs() < 1e-4);
    assert_relative_eq!(m.settling_time, 4.0, max_relative = 1e-12);
    let vp = m.overshoot.unwrap();
    assert_relative_eq!(vp, (-PI * 0.5 / 0.75f64.sqrt()).exp(), max_relative = 1e-12);
    assert!((vp - 0.1630).abs() < 1e-4);
    let tc = m.peak_time.unwrap();
    assert_relative_eq!(tc, PI / (2.0 * 0.75f64.sqrt()), max_relative = 1e-12);
    assert!((tc - 1.8138).abs() < 1e-4);
}

#[test]
fn critical_and_overdamped_have_no_overshoot() {
    let m = loop_metrics(LoopParams {
        kp: 1.0,
        kd: 1.0,
        tau_lag: 1.0,
    });
    assert_eq!(m.xi, 1.0);
    assert!(m.overshoot.is_none() && m.peak_time.is_none());
    let near = loop_metrics(LoopParams {
        kp: 1.0 + 1e-6,
        kd: 1.0,
        tau_lag: 1.0,
    });
    assert!(near.overshoot.unwrap() < 1e-6);
    let over = loop_metrics(LoopParams {
        kp: 0.5,
        kd: 2.0,
        tau_lag: 1.0,
    });
    assert!(over.xi > 1.0 && over.overshoot.is_none());
}

#[test]
fn integrator_matches_exact_response() {
    for (w, xi) in [(0.5, 0.2), (2.0, 0.5), (5.0, 0.9)] {
        let dt = 0.001 * 2.0 * PI / w;
        let tr = simulate_step_response(w, xi, dt, 12.0 / (xi * w)).unwrap();
        for (i, y) in tr.values.iter().enumerate().step_by(37) {
            assert!((y - analytic_step(w, xi, tr.time(i))).abs() < 1e-9);
        }
    }
}

#[test]
fn measured_overshoot_example() {
    let tr = simulate_step_response(2.0, 0.5, 0.001, 20.0).unwrap();
    let m = tr.measure();
    assert!((m.overshoot - 0.163).abs() < 0.002, "{}", m.overshoot);
    assert!((m.final_value - 1.0).abs() < 1e-6);
    assert!((tr.values.last().unwrap() - 1.0).abs() < 1e-6);
    let exact_peak = PI / (2.0 * 0.75f64.sqrt());
    assert!((m.peak_time.unwrap() - exact_peak).abs() / exact_peak < 0.01);
}

#[test]
fn measured_rise_and_settling_follow_their_definitions() {
    // Independent of the closed forms: bisect the exact response.
    let (w, xi) = (2.0, 0.5);
    let first = |level: f64| {
        let mut t = 0.0;
        while analytic_step(w, xi, t) < level {
            t += 1e-4;
        }
        let (mut lo, mut hi) = (t - 1e-4, t);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if analytic_step(w, xi, mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let m = simulate_step_response(w, xi, 0.0005, 20.0)
        .unwrap()
        .measure();
    let rise = first(0.9) - first(0.1);
    assert!(
        (m.rise_time - rise).abs() < 1e-3,
        "{} vs {}",
        m.rise_time,
        rise
    );
    // Last time |y - 1| = 0.1, scanning back from the tail.
    let mut t = 20.0;
    while (analytic_step(w, xi, t) - 1.0).abs() <= 0.1 {
        t -= 1e-5;
    }
    assert!(
        (m.settling_time - t).abs() < 1e-3,
        "{} vs {}",
        m.settling_time,
        t
    );
}

#[test]
fn critically_damped_trace_has_no_overshoot() {
    let m = simulate_step_response(1.0, 1.0, 0.005, 30.0)
        .unwrap()
        .measure();
    assert_eq!(m.overshoot, 0.0);
    assert!(m.peak_time.is_none());
}

#[test]
fn oracle_rejects_bad_inputs() {
    assert!(matches!(
        simulate_step_response(5.0, 0.5, 0.1, 20.0),
        Err(OracleError::StepTooCoarse { .. })
    ));
    assert!(matches!(
        simulate_step_response(0.5, 0.2, 0.01, 5.0),
        Err(OracleError::HorizonTooShort { .. })
    ));
    assert!(simulate_full_loop_step(
        LoopParams {
            kp: -1.0,
            kd: 0.0,
            tau_lag: 1.0
        },
        0.01,
        10.0
    )
    .is_err());
}

#[test]
fn zero_derivative_gain_full_loop_matches_g() {
    let p = LoopParams {
        kp: 3.0,
        kd: 0.0,
        tau_lag: 1.5,
    };
    let (h, g) = simulate_full_loop_step(p, 0.002, 40.0).unwrap();
    let worst = h
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.01);
}

#[test]
fn full_loop_zero_speeds_rise_and_raises_overshoot() {
    let p = LoopParams {
        kp: 4.0,
        kd: 1.0,
        tau_lag: 1.0,
    };
    let (h, g) = simulate_full_loop_step(p, 0.001, 30.0).unwrap();
    let (mh, mg) = (h.measure(), g.measure());
    assert!(mh.rise_time < mg.rise_time);
    assert!(mh.overshoot > mg.overshoot);
}

#[test]
fn deceleration_bound_examples() {
    assert_relative_eq!(kd_bound_decel(2.0, 0.2), 0.25, max_relative = 1e-12);
    assert_eq!(kd_bound_decel(8.0 * 0.7, 0.7), 0.0);
    assert_relative_eq!(
        kd_bound_decel(0.7, 3.2),
        0.7 / 25.6 - 1.0,
        max_relative = 1e-12
    );
    assert!((kd_bound_decel(0.7, 3.2) + 0.973).abs() < 1e-3);
}

#[test]
fn acceleration_constraint_examples() {
    assert!(accel_constraint_ok(4.0, 1.0, 1.0, 0.0, 10.0));
    assert!(!accel_constraint_ok(4.0, 1.0, 1.0, 0.0, 0.1));
    // Overdamped and critically damped loops pass regardless of S_min.
    assert!(accel_constraint_ok(1.0, 1.0, 1.0, 0.0, -100.0));
    assert!(accel_constraint_ok(0.2, 3.0, 1.0, 0.0, -100.0));
}

#[test]
fn tuning_examples() {
    let input = |phase, t_min, tau_lag| TuneInput {
        t_min,
        tau_lag,
        v_leader: 0.0,
        s_min: 10.0,
        phase,
    };
    let t = tune_gains(1.0, 1.0, input(Phase::Decelerating, 2.0, 0.2));
    assert_relative_eq!(t.kd, 0.225, max_relative = 1e-12);
    assert_eq!(t.kp, 1.0);
    assert!(!t.infeasible);

    let t = tune_gains(0.7, 1.3, input(Phase::Cruising, 2.0, 0.2));
    assert_eq!((t.kp, t.kd, t.infeasible), (0.7, 1.3, false));

    let t = tune_gains(1.0, 1.0, input(Phase::Decelerating, 0.7, 3.2));
    assert_eq!(t.kd, 0.0);
    assert!(t.infeasible);
}

#[test]
fn acceleration_tuning_backs_off() {
    // Fails at S_min = 0.1 (see the constraint example); back-off lowers
    // the gains geometrically until it passes.
    let input = TuneInput {
        t_min: 1.0,
        tau_lag: 1.0,
        v_leader: 0.0,
        s_min: 0.1,
        phase: Phase::Accelerating,
    };
    let t = tune_gains(4.0, 1.0, input);
    assert!(accel_constraint_ok(t.kp, t.kd, 1.0, 0.0, 0.1));
    let steps = (t.kp / 4.0).ln() / 0.8f64.ln();
    assert!((steps - steps.round()).abs() < 1e-9 && steps >= 1.0);
    assert_relative_eq!(t.kd / 1.0, t.kp / 4.0, max_relative = 1e-12);
    assert!(!t.infeasible);
}

#[test]
fn phase_deadband() {
    assert_eq!(Phase::from_command(0.02), Phase::Accelerating);
    assert_eq!(Phase::from_command(-0.02), Phase::Decelerating);
    assert_eq!(Phase::from_command(0.005), Phase::Cruising);
    assert_eq!(Phase::from_command(-0.01), Phase::Cruising);
}

proptest! {
    #[test]
    fn closed_form_constraint_matches_metric_product(
        kp in 0.1f64..10.0,
        kd in 0.0f64..3.0,
        tau in 0.1f64..5.0,
        v in 0.0f64..2.0,
        s_min in -5.0f64..50.0,
    ) {
        let p = LoopParams { kp, kd, tau_lag: tau };
        prop_assume!(p.discriminant() > 1e-6);
        let m = loop_metrics(p);
        let lhs = (m.peak_time.unwrap() - m.rise_time) * (m.overshoot.unwrap() - v);
        prop_assume!((lhs - s_min).abs() > 1e-9 * (1.0 + lhs.abs()));
        prop_assert_eq!(accel_constraint_ok(kp, kd, tau, v, s_min), lhs < s_min);
    }

    #[test]
    fn decel_bound_monotone(t in 0.0f64..10.0, dt in 1e-3f64..5.0, tau in 0.05f64..5.0, dtau in 1e-3f64..5.0) {
        prop_assert!(kd_bound_decel(t + dt, tau) > kd_bound_decel(t, tau));
        prop_assert!(kd_bound_decel(t, tau + dtau) <= kd_bound_decel(t, tau));
        if t > 0.0 {
            prop_assert!(kd_bound_decel(t, tau + dtau) < kd_bound_decel(t, tau));
        }
    }

    #[test]
    fn tuner_never_raises_gains(
        kp in 0.0f64..5.0,
        kd in 0.0f64..5.0,
        t_min in -2.0f64..5.0,
        tau in 0.0f64..8.0,
        v in 0.0f64..120.0,
        s_min in -50.0f64..200.0,
        phase in prop::sample::select(vec![Phase::Accelerating, Phase::Decelerating, Phase::Cruising]),
    ) {
        let t = tune_gains(kp, kd, TuneInput { t_min, tau_lag: tau, v_leader: v, s_min, phase });
        prop_assert!(t.kp <= kp && t.kd <= kd);
        prop_assert!(t.kp >= 0.0 && t.kd >= 0.0);
        if phase == Phase::Decelerating && tau > 0.0 {
            let bound = kd_bound_decel(t_min, tau);
            if bound > 0.0 {
                prop_assert!(t.kd < bound);
            } else {
                prop_assert!(t.infeasible && t.kd == 0.0);
            }
        }
        if phase == Phase::Accelerating && tau > 0.0 && !t.infeasible {
            prop_assert!(accel_constraint_ok(t.kp, t.kd, tau, v, s_min));
        }
        if phase == Phase::Accelerating && tau > 0.0 && t.kp < kp {
            let steps = (t.kp / kp).ln() / 0.8f64.ln();
            prop_assert!(steps <= MAX_BACKOFF_STEPS as f64 + 1e-9 || t.kp == KP_FLOOR);
        }
    }
}
