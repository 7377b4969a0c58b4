//! Vehicle and driver catalog.
//!
//! All lengths in ft, weights in lb, engine speeds in revs/min and torques
//! in ft-lb. Built-in data lives in [`builtin`]; CSV ingestion in
//! [`catalog`].

pub mod builtin;
pub mod catalog;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use builtin::{load_builtin_drivers, load_builtin_fleet};
pub use catalog::{
    load_catalog, parse_catalog, parse_torque_maps, serialize_catalog, serialize_torque_maps,
    torque_sidecar_path,
};

use crate::units::{mph_to_fps, GRAVITY};

pub const DEFAULT_WHEELBASE_RATIO: f64 = 0.55;
pub const DEFAULT_CG_HEIGHT_RATIO: f64 = 0.35;
/// `l_r / L`; the rear axle to centre of gravity distance is half the wheelbase.
pub const DEFAULT_REAR_AXLE_RATIO: f64 = 0.5;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("vehicle {id}: {field} {reason}")]
    Invalid {
        id: u32,
        field: &'static str,
        reason: String,
    },
    #[error("driver {id}: {reason}")]
    InvalidDriver { id: u32, reason: String },
    #[error("vehicle {id}: no torque map for engine {id}")]
    MissingTorqueMap { id: u32 },
    #[error("unknown vehicle id {0}")]
    UnknownVehicle(u32),
    #[error("unknown driver id {0}")]
    UnknownDriver(u32),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FleetType {
    SmallAuto,
    LargeAuto,
    SmallTruck,
    LargeTruck,
}

impl FleetType {
    pub fn as_str(self) -> &'static str {
        match self {
            FleetType::SmallAuto => "small-auto",
            FleetType::LargeAuto => "large-auto",
            FleetType::SmallTruck => "small-truck",
            FleetType::LargeTruck => "large-truck",
        }
    }

    pub fn is_truck(self) -> bool {
        matches!(self, FleetType::SmallTruck | FleetType::LargeTruck)
    }
}

impl fmt::Display for FleetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FleetType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small-auto" => Ok(FleetType::SmallAuto),
            "large-auto" => Ok(FleetType::LargeAuto),
            "small-truck" => Ok(FleetType::SmallTruck),
            "large-truck" => Ok(FleetType::LargeTruck),
            other => Err(format!("unknown fleet type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Drivetrain {
    FrontWheel,
    RearWheel,
    AllWheel,
}

impl Drivetrain {
    pub fn as_str(self) -> &'static str {
        match self {
            Drivetrain::FrontWheel => "front-wheel",
            Drivetrain::RearWheel => "rear-wheel",
            Drivetrain::AllWheel => "all-wheel",
        }
    }
}

impl fmt::Display for Drivetrain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Drivetrain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "front-wheel" => Ok(Drivetrain::FrontWheel),
            "rear-wheel" => Ok(Drivetrain::RearWheel),
            "all-wheel" => Ok(Drivetrain::AllWheel),
            other => Err(format!("unknown drivetrain `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorqueKnot {
    pub rpm: f64,
    pub torque: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    /// Litres.
    pub displacement: f64,
    pub idle_speed: f64,
    pub max_speed: f64,
    pub torque_map: Vec<TorqueKnot>,
}

impl EngineSpec {
    /// Torque at engine speed `rpm`, linearly interpolated over the map.
    /// The speed is clamped into `[idle_speed, max_speed]` first.
    pub fn torque_at(&self, rpm: f64) -> f64 {
        let map = &self.torque_map;
        let n = rpm.clamp(self.idle_speed, self.max_speed);
        let idx = map.partition_point(|k| k.rpm <= n);
        if idx == 0 {
            return map[0].torque;
        }
        if idx == map.len() {
            return map[map.len() - 1].torque;
        }
        let (lo, hi) = (map[idx - 1], map[idx]);
        let frac = (n - lo.rpm) / (hi.rpm - lo.rpm);
        lo.torque + frac * (hi.torque - lo.torque)
    }

    pub fn peak_torque(&self) -> TorqueKnot {
        self.torque_map
            .iter()
            .copied()
            .fold(self.torque_map[0], |best, k| {
                if k.torque > best.torque {
                    k
                } else {
                    best
                }
            })
    }

    fn validate(&self, id: u32) -> Result<(), CatalogError> {
        let invalid = |field, reason: &str| CatalogError::Invalid {
            id,
            field,
            reason: reason.to_string(),
        };
        if !(self.idle_speed > 0.0) {
            return Err(invalid("idle_speed", "must be positive"));
        }
        if !(self.max_speed > self.idle_speed) {
            return Err(invalid("max_speed", "must exceed idle_speed"));
        }
        if self.torque_map.len() < 2 {
            return Err(invalid("torque_map", "needs at least two knots"));
        }
        if self.torque_map.windows(2).any(|w| !(w[1].rpm > w[0].rpm)) {
            return Err(invalid("torque_map", "must be strictly increasing in rpm"));
        }
        if self.torque_map.iter().any(|k| !(k.torque > 0.0)) {
            return Err(invalid("torque_map", "torques must be positive"));
        }
        let first = self.torque_map[0].rpm;
        let last = self.torque_map[self.torque_map.len() - 1].rpm;
        if first > self.idle_speed || last < self.max_speed {
            return Err(invalid("torque_map", "must span [idle_speed, max_speed]"));
        }
        Ok(())
    }
}

/// One forward gear. Shift speeds are in mi/h: the box upshifts out of this
/// gear above `shift_up_speed` and downshifts out of it below
/// `shift_down_speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gear {
    pub ratio: f64,
    pub shift_up_speed: f64,
    pub shift_down_speed: f64,
}

impl Gear {
    pub fn shift_up_fps(&self) -> f64 {
        mph_to_fps(self.shift_up_speed)
    }

    pub fn shift_down_fps(&self) -> f64 {
        mph_to_fps(self.shift_down_speed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSpec {
    pub axle_slippage: f64,
    pub drivetrain_efficiency: f64,
    pub differential_ratio: f64,
    pub gears: Vec<Gear>,
}

impl TransmissionSpec {
    pub fn gear_count(&self) -> usize {
        self.gears.len()
    }

    /// Gears are numbered from 1.
    pub fn gear(&self, gear: usize) -> &Gear {
        &self.gears[gear - 1]
    }

    /// Overall reduction (transmission ratio times differential ratio).
    pub fn overall_ratio(&self, gear: usize) -> f64 {
        self.gear(gear).ratio * self.differential_ratio
    }

    fn validate(&self, id: u32) -> Result<(), CatalogError> {
        let invalid = |field, reason: &str| CatalogError::Invalid {
            id,
            field,
            reason: reason.to_string(),
        };
        if !(0.0..1.0).contains(&self.axle_slippage) {
            return Err(invalid("slippage", "must be in [0, 1)"));
        }
        if !(self.drivetrain_efficiency > 0.0 && self.drivetrain_efficiency <= 1.0) {
            return Err(invalid("efficiency", "must be in (0, 1]"));
        }
        if !(self.differential_ratio > 0.0) {
            return Err(invalid("diff_ratio", "must be positive"));
        }
        if self.gears.is_empty() {
            return Err(invalid("gears", "must list at least one gear"));
        }
        if self.gears.iter().any(|g| !(g.ratio > 0.0)) {
            return Err(invalid("gears", "ratios must be positive"));
        }
        if self.gears.windows(2).any(|w| !(w[1].ratio < w[0].ratio)) {
            return Err(invalid("gears", "ratios must strictly decrease"));
        }
        if self
            .gears
            .iter()
            .any(|g| !(g.shift_down_speed < g.shift_up_speed) || g.shift_down_speed < 0.0)
        {
            return Err(invalid(
                "gears",
                "shift_down_speed must be below shift_up_speed",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub id: u32,
    pub name: String,
    pub fleet_type: FleetType,
    pub fhwa_class: u8,
    /// Overall length, the `L_i` of the bumper-to-bumper gap.
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub weight: f64,
    pub wheel_radius: f64,
    pub drag_coefficient: f64,
    pub drivetrain: Drivetrain,
    pub engine: EngineSpec,
    pub transmission: TransmissionSpec,
    /// Wheelbase as a fraction of overall length.
    pub wheelbase_ratio: f64,
    /// Centre-of-gravity height as a fraction of wheelbase.
    pub cg_height_ratio: f64,
    /// `l_r` as a fraction of wheelbase.
    pub rear_axle_ratio: f64,
}

impl VehicleSpec {
    pub fn frontal_area(&self) -> f64 {
        self.width * self.height
    }

    /// Slugs.
    pub fn mass(&self) -> f64 {
        self.weight / GRAVITY
    }

    pub fn wheelbase(&self) -> f64 {
        self.wheelbase_ratio * self.length
    }

    pub fn cg_height(&self) -> f64 {
        self.cg_height_ratio * self.wheelbase()
    }

    /// Rear axle to centre of gravity.
    pub fn l_r(&self) -> f64 {
        self.rear_axle_ratio * self.wheelbase()
    }

    /// Front axle to centre of gravity.
    pub fn l_f(&self) -> f64 {
        self.wheelbase() - self.l_r()
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let id = self.id;
        let positive = |field, value: f64| {
            if value > 0.0 {
                Ok(())
            } else {
                Err(CatalogError::Invalid {
                    id,
                    field,
                    reason: "must be positive".into(),
                })
            }
        };
        positive("length", self.length)?;
        positive("width", self.width)?;
        positive("height", self.height)?;
        positive("weight", self.weight)?;
        positive("wheel_radius", self.wheel_radius)?;
        positive("wheelbase_ratio", self.wheelbase_ratio)?;
        positive("cg_height_ratio", self.cg_height_ratio)?;
        if !(self.drag_coefficient > 0.0 && self.drag_coefficient < 2.0) {
            return Err(CatalogError::Invalid {
                id,
                field: "drag_coeff",
                reason: "must be in (0, 2)".into(),
            });
        }
        if self.wheelbase_ratio > 1.0 {
            return Err(CatalogError::Invalid {
                id,
                field: "wheelbase_ratio",
                reason: "must not exceed 1".into(),
            });
        }
        if !(self.rear_axle_ratio > 0.0 && self.rear_axle_ratio < 1.0) {
            return Err(CatalogError::Invalid {
                id,
                field: "rear_axle_ratio",
                reason: "must be in (0, 1)".into(),
            });
        }
        if !(self.cg_height() < self.height) {
            return Err(CatalogError::Invalid {
                id,
                field: "cg_height_ratio",
                reason: format!(
                    "puts the centre of gravity at {:.2} ft, above the {:.2} ft roof",
                    self.cg_height(),
                    self.height
                ),
            });
        }
        self.engine.validate(id)?;
        self.transmission.validate(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverType {
    pub id: u32,
    /// `w`, scales free-flow speed.
    pub speed_multiplier: f64,
    /// `n`, scales maximum acceleration.
    pub acceleration_multiplier: f64,
    /// `q`, scales maximum deceleration.
    pub deceleration_multiplier: f64,
    /// Percent of traffic.
    pub traffic_share: f64,
}

impl DriverType {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let in_band = |m: f64| m > 0.5 && m < 1.5;
        if !(in_band(self.speed_multiplier)
            && in_band(self.acceleration_multiplier)
            && in_band(self.deceleration_multiplier))
        {
            return Err(CatalogError::InvalidDriver {
                id: self.id,
                reason: "multipliers must lie in (0.5, 1.5)".into(),
            });
        }
        Ok(())
    }
}

/// A validated, immutable set of vehicles and drivers.
#[derive(Debug, Clone)]
pub struct Fleet {
    vehicles: Vec<VehicleSpec>,
    drivers: Vec<DriverType>,
}

impl Fleet {
    pub fn builtin() -> Self {
        Fleet {
            vehicles: load_builtin_fleet(),
            drivers: load_builtin_drivers(),
        }
    }

    pub fn new(vehicles: Vec<VehicleSpec>, drivers: Vec<DriverType>) -> Result<Self, CatalogError> {
        for v in &vehicles {
            v.validate()?;
        }
        for d in &drivers {
            d.validate()?;
        }
        Ok(Fleet { vehicles, drivers })
    }

    pub fn vehicles(&self) -> &[VehicleSpec] {
        &self.vehicles
    }

    pub fn drivers(&self) -> &[DriverType] {
        &self.drivers
    }

    pub fn vehicle(&self, id: u32) -> Result<&VehicleSpec, CatalogError> {
        self.vehicles
            .iter()
            .find(|v| v.id == id)
            .ok_or(CatalogError::UnknownVehicle(id))
    }

    pub fn driver(&self, id: u32) -> Result<&DriverType, CatalogError> {
        self.drivers
            .iter()
            .find(|d| d.id == id)
            .ok_or(CatalogError::UnknownDriver(id))
    }
}
