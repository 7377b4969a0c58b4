//! Numerical step responses, integrated with classic RK4. Used as an
//! independent check on the closed-form metrics.

use super::LoopParams;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("time step {dt} too coarse for natural frequency {omega_n}")]
    StepTooCoarse { dt: f64, omega_n: f64 },
    #[error("response has not settled within the {horizon} s horizon")]
    HorizonTooShort { horizon: f64 },
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub dt: f64,
    pub values: Vec<f64>,
}

/// Metrics read off a sampled unit-step response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredStep {
    /// 10% to 90% of the final value.
    pub rise_time: f64,
    /// Last exit from the ±10% band.
    pub settling_time: f64,
    /// Peak minus one; 0 when the response never exceeds the final value.
    pub overshoot: f64,
    pub peak_time: Option<f64>,
    pub final_value: f64,
}

const BAND: f64 = 0.1;

type Deriv = fn(&[f64; 2], &[f64; 3]) -> [f64; 2];

/// State `[z, z']` of `a z'' + b z' + c z = 1`, coefficients `[a, b, c]`.
fn second_order(z: &[f64; 2], coef: &[f64; 3]) -> [f64; 2] {
    [z[1], (1.0 - coef[1] * z[1] - coef[2] * z[0]) / coef[0]]
}

fn integrate(f: Deriv, coef: [f64; 3], dt: f64, horizon: f64) -> Vec<[f64; 2]> {
    let n = (horizon / dt).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut z = [0.0, 0.0];
    out.push(z);
    for _ in 0..n {
        let k1 = f(&z, &coef);
        let k2 = f(&[z[0] + 0.5 * dt * k1[0], z[1] + 0.5 * dt * k1[1]], &coef);
        let k3 = f(&[z[0] + 0.5 * dt * k2[0], z[1] + 0.5 * dt * k2[1]], &coef);
        let k4 = f(&[z[0] + dt * k3[0], z[1] + dt * k3[1]], &coef);
        for i in 0..2 {
            z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(z);
    }
    out
}

fn check_dt(dt: f64, omega_n: f64) -> Result<(), OracleError> {
    if !(dt > 0.0) || dt > 0.01 * (2.0 * std::f64::consts::PI / omega_n) {
        return Err(OracleError::StepTooCoarse { dt, omega_n });
    }
    Ok(())
}

/// Unit step of `ω_n² / (s² + 2ξω_n s + ω_n²)`.
pub fn simulate_step_response(
    omega_n: f64,
    xi: f64,
    dt: f64,
    horizon: f64,
) -> Result<StepTrace, OracleError> {
    if !(omega_n > 0.0 && xi >= 0.0) {
        return Err(OracleError::InvalidLoop(format!(
            "omega_n {omega_n}, xi {xi}"
        )));
    }
    check_dt(dt, omega_n)?;
    let w2 = omega_n * omega_n;
    // z'' + 2ξω z' + ω² z = 1, y = ω² z
    let states = integrate(second_order, [1.0, 2.0 * xi * omega_n, w2], dt, horizon);
    let trace = StepTrace {
        dt,
        values: states.iter().map(|z| w2 * z[0]).collect(),
    };
    trace.require_settled(horizon)?;
    Ok(trace)
}

/// Unit steps of the full loop `H(s)` and of the zero-free `G(s)` with the
/// same denominator, returned as `(H, G)`.
pub fn simulate_full_loop_step(
    p: LoopParams,
    dt: f64,
    horizon: f64,
) -> Result<(StepTrace, StepTrace), OracleError> {
    if !(p.kp > 0.0 && p.kd >= 0.0 && p.tau_lag > 0.0) {
        return Err(OracleError::InvalidLoop(format!("{p:?}")));
    }
    check_dt(dt, (p.kp / p.tau_lag).sqrt())?;
    let states = integrate(second_order, [p.tau_lag, p.kd + 1.0, p.kp], dt, horizon);
    let h = StepTrace {
        dt,
        values: states.iter().map(|z| p.kp * z[0] + p.kd * z[1]).collect(),
    };
    let g = StepTrace {
        dt,
        values: states.iter().map(|z| p.kp * z[0]).collect(),
    };
    h.require_settled(horizon)?;
    g.require_settled(horizon)?;
    Ok((h, g))
}

impl StepTrace {
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// The final fifth of the horizon must sit inside the ±10% band.
    fn require_settled(&self, horizon: f64) -> Result<(), OracleError> {
        let tail = self.values.len() - self.values.len() / 5;
        if self.values[tail..].iter().any(|y| (y - 1.0).abs() > BAND) {
            return Err(OracleError::HorizonTooShort { horizon });
        }
        Ok(())
    }

    fn first_crossing(&self, level: f64) -> f64 {
        let y = &self.values;
        for i in 1..y.len() {
            if y[i] >= level {
                let frac = (level - y[i - 1]) / (y[i] - y[i - 1]);
                return self.time(i - 1) + frac * self.dt;
            }
        }
        f64::NAN
    }

    pub fn measure(&self) -> MeasuredStep {
        let y = &self.values;
        let final_value = 1.0;
        let rise_time = self.first_crossing(0.9) - self.first_crossing(0.1);

        let settling_time = match y.iter().rposition(|v| (v - final_value).abs() > BAND) {
            None => 0.0,
            Some(i) if i + 1 < y.len() => {
                let edge = if y[i] > final_value {
                    final_value + BAND
                } else {
                    final_value - BAND
                };
                let frac = (edge - y[i]) / (y[i + 1] - y[i]);
                self.time(i) + frac * self.dt
            }
            Some(i) => self.time(i),
        };

        let (imax, &ymax) = y
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty trace");
        let (mut peak, mut peak_time) = (ymax, None);
        if ymax > final_value && imax > 0 && imax + 1 < y.len() {
            // parabola through the three samples around the maximum
            let (a, b, c) = (y[imax - 1], y[imax], y[imax + 1]);
            let denom = a - 2.0 * b + c;
            let offset = if denom != 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            peak = b - 0.25 * (a - c) * offset;
            peak_time = Some(self.time(imax) + offset * self.dt);
        }
        MeasuredStep {
            rise_time,
            settling_time,
            overshoot: (peak - final_value).max(0.0),
            peak_time,
            final_value: *y.last().expect("non-empty trace"),
        }
    }
}
