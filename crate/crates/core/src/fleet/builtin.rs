//! The fourteen built-in vehicle models and ten driver types.
//!
//! Physical, engine, transmission and drivetrain numbers are copied from
//! the published fleet tables. Torque curves were only ever published as
//! plots, so each engine gets a synthetic map (see [`passenger_torque_map`]
//! and [`truck_torque_map`]). Wheelbase and centre-of-gravity height are
//! not tabulated either; the per-vehicle ratios in [`CALIBRATION`] were fitted
//! with `examples/calibrate_fleet.rs`.

use super::{
    DriverType, Drivetrain, EngineSpec, FleetType, Gear, TorqueKnot, TransmissionSpec, VehicleSpec,
    DEFAULT_REAR_AXLE_RATIO, DEFAULT_WHEELBASE_RATIO,
};
use crate::units::FT_LB_PER_S_PER_HP;

struct Physical {
    id: u32,
    name: &'static str,
    fleet: FleetType,
    fhwa: u8,
    length: f64,
    width: f64,
    height: f64,
    weight: f64,
    wheel_radius: f64,
    drag: f64,
}

const PHYSICAL: [Physical; 14] = [
    Physical {
        id: 1,
        name: "2006 Honda Civic Si",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 14.57,
        width: 5.740,
        height: 4.460,
        weight: 3060.0,
        wheel_radius: 1.03,
        drag: 0.33,
    },
    Physical {
        id: 2,
        name: "2008 Chevy Impala",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 16.70,
        width: 6.100,
        height: 4.900,
        weight: 3756.0,
        wheel_radius: 1.11,
        drag: 0.33,
    },
    Physical {
        id: 3,
        name: "1998 Buick Century",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 16.22,
        width: 6.060,
        height: 4.720,
        weight: 3553.0,
        wheel_radius: 1.10,
        drag: 0.32,
    },
    Physical {
        id: 4,
        name: "2004 Chevy Tahoe",
        fleet: FleetType::LargeAuto,
        fhwa: 3,
        length: 16.40,
        width: 6.575,
        height: 6.358,
        weight: 7000.0,
        wheel_radius: 1.28,
        drag: 0.43,
    },
    Physical {
        id: 5,
        name: "2002 Chevy Silverado",
        fleet: FleetType::LargeAuto,
        fhwa: 3,
        length: 18.98,
        width: 6.540,
        height: 5.930,
        weight: 5100.0,
        wheel_radius: 1.24,
        drag: 0.52,
    },
    Physical {
        id: 6,
        name: "1998 Chevy S10 Blazer",
        fleet: FleetType::LargeAuto,
        fhwa: 2,
        length: 16.94,
        width: 6.658,
        height: 5.275,
        weight: 4800.0,
        wheel_radius: 1.13,
        drag: 0.42,
    },
    Physical {
        id: 7,
        name: "2011 Ford F150",
        fleet: FleetType::LargeAuto,
        fhwa: 3,
        length: 19.31,
        width: 6.575,
        height: 6.350,
        weight: 5200.0,
        wheel_radius: 1.29,
        drag: 0.50,
    },
    Physical {
        id: 8,
        name: "2009 Honda Civic",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 14.78,
        width: 5.750,
        height: 4.708,
        weight: 3020.0,
        wheel_radius: 1.04,
        drag: 0.32,
    },
    Physical {
        id: 9,
        name: "2005 Mazda 6",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 15.57,
        width: 5.840,
        height: 4.725,
        weight: 3521.0,
        wheel_radius: 1.06,
        drag: 0.31,
    },
    Physical {
        id: 10,
        name: "2004 Pontiac Grand Am",
        fleet: FleetType::SmallAuto,
        fhwa: 2,
        length: 15.53,
        width: 5.870,
        height: 4.592,
        weight: 3300.0,
        wheel_radius: 1.04,
        drag: 0.36,
    },
    Physical {
        id: 11,
        name: "single-unit truck",
        fleet: FleetType::SmallTruck,
        fhwa: 5,
        length: 29.00,
        width: 7.000,
        height: 10.000,
        weight: 25000.0,
        wheel_radius: 1.66,
        drag: 0.55,
    },
    Physical {
        id: 12,
        name: "intermediate semi-trailer",
        fleet: FleetType::LargeTruck,
        fhwa: 8,
        length: 55.00,
        width: 8.000,
        height: 10.000,
        weight: 37000.0,
        wheel_radius: 1.66,
        drag: 0.66,
    },
    Physical {
        id: 13,
        name: "interstate semi-trailer",
        fleet: FleetType::LargeTruck,
        fhwa: 9,
        length: 68.50,
        width: 8.000,
        height: 10.000,
        weight: 53000.0,
        wheel_radius: 1.66,
        drag: 0.66,
    },
    Physical {
        id: 14,
        name: "double semi-trailer",
        fleet: FleetType::LargeTruck,
        fhwa: 12,
        length: 74.60,
        width: 8.000,
        height: 10.000,
        weight: 55000.0,
        wheel_radius: 1.66,
        drag: 0.66,
    },
];

/// (displacement L, idle rpm, max rpm), indexed by vehicle id - 1.
const ENGINES: [(f64, f64, f64); 14] = [
    (2.0, 1000.0, 8000.0),
    (4.0, 1000.0, 6400.0),
    (3.0, 700.0, 5800.0),
    (5.0, 1000.0, 5600.0),
    (5.0, 1000.0, 5650.0),
    (4.0, 1000.0, 4800.0),
    (5.0, 1500.0, 6000.0),
    (2.0, 1000.0, 6800.0),
    (2.0, 1000.0, 6500.0),
    (3.0, 1000.0, 6400.0),
    (7.0, 700.0, 2600.0),
    (12.0, 800.0, 2200.0),
    (12.0, 800.0, 2200.0),
    (12.0, 800.0, 2200.0),
];

/// (axle slippage, drivetrain efficiency, differential ratio).
const DRIVELINES: [(f64, f64, f64); 14] = [
    (0.05, 0.92, 4.770),
    (0.05, 0.92, 2.860),
    (0.05, 0.90, 3.290),
    (0.05, 0.90, 3.230),
    (0.05, 0.90, 3.230),
    (0.05, 0.90, 3.420),
    (0.05, 0.92, 3.550),
    (0.03, 0.94, 4.437),
    (0.03, 0.94, 4.147),
    (0.04, 0.93, 3.750),
    (0.05, 0.80, 4.400),
    (0.05, 0.80, 3.500),
    (0.05, 0.80, 3.500),
    (0.05, 0.80, 3.500),
];

// Published as ratio / lower band edge / upper band edge (mi/h).
const GEARS_1: &[(f64, f64, f64)] = &[
    (3.27, 0.0, 15.0),
    (2.13, 10.0, 25.0),
    (1.52, 20.0, 35.0),
    (1.15, 30.0, 45.0),
    (0.92, 40.0, 55.0),
    (0.66, 50.0, 110.0),
];
const GEARS_2: &[(f64, f64, f64)] = &[
    (2.92, 0.0, 20.0),
    (1.57, 18.0, 36.0),
    (1.00, 32.0, 56.0),
    (0.71, 52.0, 110.0),
];
const GEARS_3: &[(f64, f64, f64)] = &[
    (2.92, 0.0, 20.0),
    (1.57, 18.0, 40.0),
    (1.00, 36.0, 65.0),
    (0.71, 52.0, 110.0),
];
const GEARS_4_5_6: &[(f64, f64, f64)] = &[
    (3.06, 0.0, 20.0),
    (1.63, 18.0, 36.0),
    (1.00, 32.0, 58.0),
    (0.70, 52.0, 110.0),
];
const GEARS_7: &[(f64, f64, f64)] = &[
    (4.17, 0.0, 15.0),
    (2.34, 12.0, 30.0),
    (1.52, 26.0, 45.0),
    (1.14, 40.0, 55.0),
    (0.86, 50.0, 65.0),
    (0.69, 60.0, 110.0),
];
const GEARS_8: &[(f64, f64, f64)] = &[
    (2.67, 0.0, 22.0),
    (1.53, 18.0, 38.0),
    (1.02, 34.0, 50.0),
    (0.72, 46.0, 65.0),
    (0.53, 60.0, 110.0),
];
const GEARS_9: &[(f64, f64, f64)] = &[
    (2.82, 0.0, 18.0),
    (1.50, 15.0, 36.0),
    (1.00, 32.0, 52.0),
    (0.73, 46.0, 110.0),
];
const GEARS_10: &[(f64, f64, f64)] = &[
    (2.96, 0.0, 20.0),
    (1.62, 16.0, 38.0),
    (1.00, 34.0, 54.0),
    (0.68, 50.0, 110.0),
];
const GEARS_11: &[(f64, f64, f64)] = &[
    (7.59, 0.0, 9.0),
    (5.06, 6.0, 13.0),
    (3.38, 10.0, 20.0),
    (2.25, 17.0, 26.0),
    (1.50, 22.0, 40.0),
    (1.00, 35.0, 60.0),
    (0.75, 55.0, 110.0),
];
const GEARS_12_13_14: &[(f64, f64, f64)] = &[
    (11.06, 0.0, 5.0),
    (8.20, 3.0, 7.0),
    (6.06, 5.0, 10.0),
    (4.49, 7.0, 14.0),
    (3.32, 10.0, 19.0),
    (2.46, 13.0, 25.0),
    (1.82, 20.0, 34.0),
    (1.35, 30.0, 43.0),
    (1.00, 38.0, 55.0),
    (0.74, 50.0, 110.0),
];

fn gear_table(id: u32) -> &'static [(f64, f64, f64)] {
    match id {
        1 => GEARS_1,
        2 => GEARS_2,
        3 => GEARS_3,
        4..=6 => GEARS_4_5_6,
        7 => GEARS_7,
        8 => GEARS_8,
        9 => GEARS_9,
        10 => GEARS_10,
        11 => GEARS_11,
        _ => GEARS_12_13_14,
    }
}

pub struct Calibration {
    pub id: u32,
    pub cg_height_ratio: f64,
    /// Peak torque of the synthetic map, ft-lb. Trucks use the rated value.
    pub peak_torque: f64,
}

pub const CALIBRATION: [Calibration; 14] = [
    Calibration {
        id: 1,
        cg_height_ratio: 0.2977,
        peak_torque: 128.99,
    },
    Calibration {
        id: 2,
        cg_height_ratio: 0.2896,
        peak_torque: 198.22,
    },
    Calibration {
        id: 3,
        cg_height_ratio: 0.2861,
        peak_torque: 174.49,
    },
    Calibration {
        id: 4,
        cg_height_ratio: 0.3854,
        peak_torque: 304.56,
    },
    Calibration {
        id: 5,
        cg_height_ratio: 0.3070,
        peak_torque: 266.20,
    },
    Calibration {
        id: 6,
        cg_height_ratio: 0.2986,
        peak_torque: 225.46,
    },
    Calibration {
        id: 7,
        cg_height_ratio: 0.3196,
        peak_torque: 354.47,
    },
    Calibration {
        id: 8,
        cg_height_ratio: 0.3145,
        peak_torque: 109.49,
    },
    Calibration {
        id: 9,
        cg_height_ratio: 0.2972,
        peak_torque: 137.34,
    },
    Calibration {
        id: 10,
        cg_height_ratio: 0.2900,
        peak_torque: 141.69,
    },
    Calibration {
        id: 11,
        cg_height_ratio: 0.3451,
        peak_torque: PX7_PEAK_TORQUE,
    },
    Calibration {
        id: 12,
        cg_height_ratio: 0.1807,
        peak_torque: MX13_PEAK_TORQUE,
    },
    Calibration {
        id: 13,
        cg_height_ratio: 0.1448,
        peak_torque: MX13_PEAK_TORQUE,
    },
    Calibration {
        id: 14,
        cg_height_ratio: 0.1323,
        peak_torque: MX13_PEAK_TORQUE,
    },
];

/// PACCAR PX-7 rating: 300 hp / 660 lb-ft.
pub const PX7_RATED_HP: f64 = 300.0;
pub const PX7_PEAK_TORQUE: f64 = 660.0;
pub const PX7_PEAK_RPM: f64 = 1400.0;
/// PACCAR MX-13 rating: 485 hp / 1650 lb-ft.
pub const MX13_RATED_HP: f64 = 485.0;
pub const MX13_PEAK_TORQUE: f64 = 1650.0;
pub const MX13_PEAK_RPM: f64 = 1100.0;

const KNOTS: usize = 10;

/// Concave quadratic with its vertex at the peak, passing through 75% of
/// peak at idle and 85% of peak at maximum engine speed. The vertex position
/// follows from those two anchors. Sampled at nine evenly spaced speeds plus
/// the peak itself.
pub fn passenger_torque_map(idle: f64, max: f64, peak_torque: f64) -> Vec<TorqueKnot> {
    let k = (0.15f64 / 0.25).sqrt();
    let peak_rpm = (max + k * idle) / (1.0 + k);
    let curvature = 0.25 * peak_torque / (peak_rpm - idle).powi(2);
    let torque = |n: f64| peak_torque - curvature * (n - peak_rpm).powi(2);

    let mut rpms: Vec<f64> = (0..KNOTS - 1)
        .map(|i| idle + (max - idle) * i as f64 / (KNOTS - 2) as f64)
        .collect();
    rpms.push(peak_rpm);
    rpms.sort_by(f64::total_cmp);
    rpms.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    rpms.into_iter()
        .map(|rpm| TorqueKnot {
            rpm,
            torque: torque(rpm),
        })
        .collect()
}

/// Diesel shape anchored to a published hp / torque rating: quadratic rise
/// from 75% of peak at idle to the peak, flat peak torque until the rated
/// power is reached, then constant rated power out to maximum speed.
pub fn truck_torque_map(
    idle: f64,
    max: f64,
    peak_rpm: f64,
    peak_torque: f64,
    rated_hp: f64,
) -> Vec<TorqueKnot> {
    let curvature = 0.25 * peak_torque / (peak_rpm - idle).powi(2);
    let rising = |n: f64| peak_torque - curvature * (n - peak_rpm).powi(2);
    let rated_rpm =
        rated_hp * FT_LB_PER_S_PER_HP * 60.0 / (2.0 * std::f64::consts::PI * peak_torque);
    let constant_power =
        |n: f64| rated_hp * FT_LB_PER_S_PER_HP * 60.0 / (2.0 * std::f64::consts::PI * n);

    let mut knots = Vec::with_capacity(KNOTS);
    for i in 0..3 {
        let n = idle + (peak_rpm - idle) * i as f64 / 3.0;
        knots.push(TorqueKnot {
            rpm: n,
            torque: rising(n),
        });
    }
    knots.push(TorqueKnot {
        rpm: peak_rpm,
        torque: peak_torque,
    });
    let tail = KNOTS - knots.len() - 1;
    for i in 0..=tail {
        let n = rated_rpm + (max - rated_rpm) * i as f64 / tail as f64;
        knots.push(TorqueKnot {
            rpm: n,
            torque: constant_power(n).min(peak_torque),
        });
    }
    knots
}

fn engine_for(id: u32, peak_torque: f64) -> EngineSpec {
    let (displacement, idle, max) = ENGINES[(id - 1) as usize];
    let torque_map = match id {
        11 => truck_torque_map(idle, max, PX7_PEAK_RPM, peak_torque, PX7_RATED_HP),
        12..=14 => truck_torque_map(idle, max, MX13_PEAK_RPM, peak_torque, MX13_RATED_HP),
        _ => passenger_torque_map(idle, max, peak_torque),
    };
    EngineSpec {
        displacement,
        idle_speed: idle,
        max_speed: max,
        torque_map,
    }
}

pub fn load_builtin_fleet() -> Vec<VehicleSpec> {
    PHYSICAL
        .iter()
        .zip(CALIBRATION.iter())
        .map(|(p, cal)| {
            debug_assert_eq!(p.id, cal.id);
            let (axle_slippage, drivetrain_efficiency, differential_ratio) =
                DRIVELINES[(p.id - 1) as usize];
            let gears = gear_table(p.id)
                .iter()
                .map(|&(ratio, low, high)| Gear {
                    ratio,
                    shift_up_speed: high,
                    shift_down_speed: low,
                })
                .collect();
            VehicleSpec {
                id: p.id,
                name: p.name.to_string(),
                fleet_type: p.fleet,
                fhwa_class: p.fhwa,
                length: p.length,
                width: p.width,
                height: p.height,
                weight: p.weight,
                wheel_radius: p.wheel_radius,
                drag_coefficient: p.drag,
                drivetrain: Drivetrain::FrontWheel,
                engine: engine_for(p.id, cal.peak_torque),
                transmission: TransmissionSpec {
                    axle_slippage,
                    drivetrain_efficiency,
                    differential_ratio,
                    gears,
                },
                wheelbase_ratio: DEFAULT_WHEELBASE_RATIO,
                cg_height_ratio: cal.cg_height_ratio,
                rear_axle_ratio: DEFAULT_REAR_AXLE_RATIO,
            }
        })
        .collect()
}

pub fn load_builtin_drivers() -> Vec<DriverType> {
    const ROWS: [(f64, f64, f64, f64); 10] = [
        (0.910, 0.875, 0.950, 5.0),
        (0.930, 0.900, 0.960, 8.0),
        (0.950, 0.925, 0.970, 10.0),
        (0.970, 0.950, 0.980, 12.0),
        (1.000, 0.975, 0.990, 15.0),
        (1.025, 1.000, 1.000, 15.0),
        (1.050, 1.050, 1.010, 12.0),
        (1.075, 1.075, 1.020, 10.0),
        (1.100, 1.100, 1.030, 8.0),
        (1.120, 1.125, 1.040, 5.0),
    ];
    ROWS.iter()
        .enumerate()
        .map(|(i, &(w, n, q, share))| DriverType {
            id: i as u32 + 1,
            speed_multiplier: w,
            acceleration_multiplier: n,
            deceleration_multiplier: q,
            traffic_share: share,
        })
        .collect()
}
