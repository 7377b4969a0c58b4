//! Driving schedules: timestamped target speeds.

use serde::{Deserialize, Serialize};

use crate::units::{mph_to_fps, FT_PER_MILE};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: time {t} does not increase")]
    NonMonotoneTime { line: usize, t: f64 },
    #[error("line {line}: negative speed {v}")]
    NegativeSpeed { line: usize, v: f64 },
    #[error("schedule has no samples")]
    Empty,
    #[error("schedule must start at t = 0, found {0}")]
    NonZeroStart(f64),
    #[error("time {t} outside schedule [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },
    #[error("statistics need at least two samples")]
    TooShort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpeedUnits {
    #[default]
    Mph,
    Fps,
}

impl SpeedUnits {
    pub fn to_fps(self, v: f64) -> f64 {
        match self {
            SpeedUnits::Mph => mph_to_fps(v),
            SpeedUnits::Fps => v,
        }
    }
}

impl std::str::FromStr for SpeedUnits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mph" => Ok(SpeedUnits::Mph),
            "fps" => Ok(SpeedUnits::Fps),
            other => Err(format!(
                "unknown speed units `{other}` (expected mph or fps)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// ft/s
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub name: String,
    samples: Vec<Sample>,
    pub native_units: SpeedUnits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleStats {
    pub duration_s: f64,
    pub distance_mi: f64,
    pub avg_speed_fps: f64,
    pub max_speed_fps: f64,
    pub max_accel_fps2: f64,
    pub max_decel_fps2: f64,
}

impl Schedule {
    /// Samples in ft/s; time must start at 0 and strictly increase.
    pub fn new(
        name: impl Into<String>,
        samples: Vec<Sample>,
        native_units: SpeedUnits,
    ) -> Result<Self, ScheduleError> {
        let first = samples.first().ok_or(ScheduleError::Empty)?;
        if first.t != 0.0 {
            return Err(ScheduleError::NonZeroStart(first.t));
        }
        for (i, s) in samples.iter().enumerate() {
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(ScheduleError::NonMonotoneTime {
                    line: i + 1,
                    t: s.t,
                });
            }
            if !(s.v >= 0.0) {
                return Err(ScheduleError::NegativeSpeed {
                    line: i + 1,
                    v: s.v,
                });
            }
        }
        Ok(Schedule {
            name: name.into(),
            samples,
            native_units,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Linear interpolation between bracketing samples.
    pub fn speed_at(&self, t: f64) -> Result<f64, ScheduleError> {
        let duration = self.duration();
        if !(t >= 0.0 && t <= duration + 1e-9) {
            return Err(ScheduleError::OutOfRange { t, duration });
        }
        let s = &self.samples;
        let idx = s.partition_point(|p| p.t <= t);
        if idx == 0 {
            return Ok(s[0].v);
        }
        if idx == s.len() {
            return Ok(s[s.len() - 1].v);
        }
        let (lo, hi) = (s[idx - 1], s[idx]);
        let frac = (t - lo.t) / (hi.t - lo.t);
        Ok(lo.v + frac * (hi.v - lo.v))
    }

    /// Trapezoidal distance; accelerations from backward differences.
    pub fn stats(&self) -> Result<ScheduleStats, ScheduleError> {
        if self.samples.len() < 2 {
            return Err(ScheduleError::TooShort);
        }
        let mut distance_ft = 0.0;
        let mut max_accel: f64 = 0.0;
        let mut max_decel: f64 = 0.0;
        for w in self.samples.windows(2) {
            let dt = w[1].t - w[0].t;
            distance_ft += 0.5 * (w[0].v + w[1].v) * dt;
            let a = (w[1].v - w[0].v) / dt;
            max_accel = max_accel.max(a);
            max_decel = max_decel.max(-a);
        }
        let duration = self.duration();
        Ok(ScheduleStats {
            duration_s: duration,
            distance_mi: distance_ft / FT_PER_MILE,
            avg_speed_fps: distance_ft / duration,
            max_speed_fps: self.samples.iter().map(|s| s.v).fold(0.0, f64::max),
            max_accel_fps2: max_accel,
            max_decel_fps2: max_decel,
        })
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c == '\t' || c == ';' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect()
}

/// Parses two-column `time, speed` text. Comma-, tab- or
/// whitespace-separated; leading non-numeric lines (headers, EPA title
/// lines) are skipped.
pub fn parse_schedule(
    text: &str,
    units: SpeedUnits,
    name: &str,
) -> Result<Schedule, ScheduleError> {
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields = split_fields(raw);
        if fields.is_empty() {
            continue;
        }
        let numeric: Vec<Option<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        if samples.is_empty() && numeric.iter().take(2).any(Option::is_none) {
            continue;
        }
        if fields.len() < 2 {
            return Err(ScheduleError::Parse {
                line: line_no,
                message: "expected two columns".into(),
            });
        }
        let (Some(t), Some(v)) = (numeric[0], numeric[1]) else {
            return Err(ScheduleError::Parse {
                line: line_no,
                message: format!("not a number pair: `{}`", raw.trim()),
            });
        };
        if let Some(prev) = samples.last().map(|s: &Sample| s.t) {
            if !(t > prev) {
                return Err(ScheduleError::NonMonotoneTime { line: line_no, t });
            }
        }
        if !(v >= 0.0) {
            return Err(ScheduleError::NegativeSpeed { line: line_no, v });
        }
        samples.push(Sample {
            t,
            v: units.to_fps(v),
        });
    }
    Schedule::new(name, samples, units)
}

/// Writes `time_s,speed` with speeds in ft/s; read back with
/// [`SpeedUnits::Fps`].
pub fn serialize_schedule(schedule: &Schedule) -> String {
    let mut out = String::from("time_s,speed\n");
    for s in schedule.samples() {
        out.push_str(&format!("{},{}\n", s.t, s.v));
    }
    out
}
