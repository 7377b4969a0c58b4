//! Unit constants. Everything inside the engine is US customary:
//! feet, seconds, pounds (force), slugs.

/// Standard gravity, ft/s^2. Mass in slugs is `weight_lb / GRAVITY`.
pub const GRAVITY: f64 = 32.174;

/// Exact mi/h to ft/s factor.
pub const MPH_TO_FPS: f64 = 5280.0 / 3600.0;

pub const FT_PER_MILE: f64 = 5280.0;

/// One horsepower in ft-lb/s.
pub const FT_LB_PER_S_PER_HP: f64 = 550.0;

/// International foot.
pub const FT_PER_M: f64 = 1.0 / 0.3048;

pub fn mph_to_fps(mph: f64) -> f64 {
    mph * MPH_TO_FPS
}

pub fn fps_to_mph(fps: f64) -> f64 {
    fps / MPH_TO_FPS
}

/// Horsepower delivered at `rpm` with `torque` ft-lb.
pub fn horsepower(torque: f64, rpm: f64) -> f64 {
    2.0 * std::f64::consts::PI * torque * (rpm / 60.0) / FT_LB_PER_S_PER_HP
}
