//! Scenario configuration file.
//!
//! Every field except `schedule` and `vehicles` is optional and falls back to
//! the engine default. Relative paths resolve against the directory holding
//! the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use longsim::fleet::{load_catalog, Fleet};
use longsim::models::{ControlContext, DEFAULT_DETECTION_RANGE, STANDSTILL_GAP};
use longsim::schedule::{parse_schedule, SpeedUnits};
use longsim::sim::{
    CollisionPolicy, Placement, DEFAULT_COMMUNICATION_DELAY, DEFAULT_DRIVER_ID, DEFAULT_DT,
    DEFAULT_LEADER_POSITION, DEFAULT_TIME_GAP_MIN_SPEED, DEFAULT_TRANSIENT_EXCLUSION,
};
use longsim::{Capability, Environment, GainSet, Scenario, VehicleEntry, VehicleSpec};

pub const FLEET_PATH_VAR: &str = "LONGSIM_FLEET_PATH";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schedule: ScheduleConfig,
    /// Leader first.
    pub vehicles: Vec<VehicleConfig>,
    /// Vehicle catalog CSV used instead of the built-in fleet.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    #[serde(default)]
    pub environment: Environment,
    #[serde(default)]
    pub dt_s: Option<f64>,
    #[serde(default)]
    pub gains: GainsConfig,
    /// Applied to every vehicle unless the vehicle sets its own.
    #[serde(default)]
    pub time_gap_s: Option<f64>,
    #[serde(default)]
    pub sensing_delay_s: Option<f64>,
    #[serde(default)]
    pub communication_delay_s: Option<f64>,
    #[serde(default)]
    pub free_flow_speed_fps: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub detection_range_ft: Option<f64>,
    #[serde(default)]
    pub leader_position_ft: Option<f64>,
    #[serde(default)]
    pub placement: Option<Placement>,
    #[serde(default)]
    pub transient_exclusion_s: Option<f64>,
    #[serde(default)]
    pub time_gap_min_speed_fps: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub continue_on_collision: bool,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub units: SpeedUnits,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    pub vehicle_id: u32,
    /// Catalog CSV holding `vehicle_id`; overrides the scenario catalog.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    #[serde(default)]
    pub driver_id: Option<u32>,
    pub mode: Capability,
    #[serde(default)]
    pub time_gap_s: Option<f64>,
    #[serde(default)]
    pub sensing_delay_s: Option<f64>,
    #[serde(default)]
    pub communication_delay_s: Option<f64>,
    #[serde(default)]
    pub initial_speed_fps: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GainsConfig {
    pub kp1: Option<f64>,
    pub kp2: Option<f64>,
    pub kp3: Option<f64>,
    pub ki1: Option<f64>,
    pub kd1: Option<f64>,
    pub kd2: Option<f64>,
}

impl GainsConfig {
    fn apply(&self, mut g: GainSet) -> GainSet {
        let pairs = [
            (&mut g.kp1, self.kp1),
            (&mut g.kp2, self.kp2),
            (&mut g.kp3, self.kp3),
            (&mut g.ki1, self.ki1),
            (&mut g.kd1, self.kd1),
            (&mut g.kd2, self.kd2),
        ];
        for (slot, value) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        g
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub trace: String,
    pub summary: String,
    /// Plot file for vehicle `i` is `{plot_prefix}{i}.csv`.
    pub plot_prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            trace: "trace.csv".into(),
            summary: "summary.json".into(),
            plot_prefix: "plot_vehicle_".into(),
        }
    }
}

/// A parsed config plus the directory its relative paths hang off.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ScenarioConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output.dir)
    }

    fn fleet_source(&self) -> Option<PathBuf> {
        match &self.config.catalog {
            Some(p) => Some(self.resolve(p)),
            None => std::env::var_os(FLEET_PATH_VAR).map(PathBuf::from),
        }
    }

    fn vehicle_spec(
        &self,
        v: &VehicleConfig,
        cache: &mut BTreeMap<PathBuf, Vec<VehicleSpec>>,
    ) -> Result<VehicleSpec> {
        let source = match &v.catalog {
            Some(p) => Some(self.resolve(p)),
            None => self.fleet_source(),
        };
        let Some(path) = source else {
            return Ok(Fleet::builtin().vehicle(v.vehicle_id)?.clone());
        };
        if !cache.contains_key(&path) {
            let specs = load_catalog(&path)
                .with_context(|| format!("loading catalog {}", path.display()))?;
            cache.insert(path.clone(), specs);
        }
        cache[&path]
            .iter()
            .find(|s| s.id == v.vehicle_id)
            .cloned()
            .with_context(|| format!("vehicle {} not in catalog {}", v.vehicle_id, path.display()))
    }

    /// Resolves files and defaults into a validated scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let c = &self.config;
        let schedule_path = self.resolve(&c.schedule.path);
        let text = std::fs::read_to_string(&schedule_path).with_context(|| {
            format!(
                "schedule file {} could not be read",
                schedule_path.display()
            )
        })?;
        let name = c.schedule.name.clone().unwrap_or_else(|| {
            schedule_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        let schedule = parse_schedule(&text, c.schedule.units, &name)
            .with_context(|| format!("schedule file {}", schedule_path.display()))?;

        if c.vehicles.is_empty() {
            bail!("vehicles: at least one vehicle is required");
        }
        let drivers = Fleet::builtin();
        let mut cache = BTreeMap::new();
        let mut entries = Vec::with_capacity(c.vehicles.len());
        for (i, v) in c.vehicles.iter().enumerate() {
            let spec = self
                .vehicle_spec(v, &mut cache)
                .with_context(|| format!("vehicles[{i}]"))?;
            let driver = *drivers
                .driver(v.driver_id.unwrap_or(DEFAULT_DRIVER_ID))
                .with_context(|| format!("vehicles[{i}]"))?;
            let mut e = VehicleEntry::new(spec, driver, v.mode);
            if let Some(x) = v.sensing_delay_s.or(c.sensing_delay_s) {
                e.sensing_delay = x;
            }
            if let Some(x) = v.communication_delay_s.or(c.communication_delay_s) {
                e.communication_delay = x;
            }
            if let Some(x) = v.time_gap_s.or(c.time_gap_s) {
                e.time_gap = x;
            }
            if let Some(x) = v.initial_speed_fps {
                e.initial_speed = x;
            }
            entries.push(e);
        }

        let mut sc = Scenario::new(schedule, entries);
        sc.env = c.environment;
        sc.dt = c.dt_s.unwrap_or(DEFAULT_DT);
        sc.gains = c.gains.apply(GainSet::default());
        let ctx = ControlContext::default();
        sc.control = ControlContext {
            free_flow_speed: c.free_flow_speed_fps.unwrap_or(ctx.free_flow_speed),
            alpha: c.alpha.unwrap_or(ctx.alpha),
            beta: c.beta.unwrap_or(ctx.beta),
        };
        sc.detection_range = c.detection_range_ft.unwrap_or(DEFAULT_DETECTION_RANGE);
        sc.leader_position = c.leader_position_ft.unwrap_or(DEFAULT_LEADER_POSITION);
        sc.placement = c.placement.unwrap_or_default();
        sc.transient_exclusion = c
            .transient_exclusion_s
            .unwrap_or(DEFAULT_TRANSIENT_EXCLUSION);
        sc.time_gap_min_speed = c
            .time_gap_min_speed_fps
            .unwrap_or(DEFAULT_TIME_GAP_MIN_SPEED);
        sc.seed = c.seed.unwrap_or(0);
        sc.collision_policy = if c.continue_on_collision {
            CollisionPolicy::Continue
        } else {
            CollisionPolicy::Halt
        };
        sc.validate()?;
        sc.initial_positions()?;
        Ok(sc)
    }
}

/// Every default the run command falls back to.
pub fn defaults() -> serde_json::Value {
    let ctx = ControlContext::default();
    let per_mode = |f: fn(Capability) -> serde_json::Value| {
        let mut m = serde_json::Map::new();
        for cap in [
            Capability::Manual,
            Capability::Autonomous,
            Capability::Cooperative,
        ] {
            m.insert(cap.as_str().into(), f(cap));
        }
        serde_json::Value::Object(m)
    };
    serde_json::json!({
        "dt_s": DEFAULT_DT,
        "environment": Environment::default(),
        "gains": GainSet::default(),
        "free_flow_speed_fps": ctx.free_flow_speed,
        "alpha": ctx.alpha,
        "beta": ctx.beta,
        "detection_range_ft": DEFAULT_DETECTION_RANGE,
        "standstill_gap_ft": STANDSTILL_GAP,
        "driver_id": DEFAULT_DRIVER_ID,
        "sensing_delay_s": per_mode(|c| c.default_sensing_delay().into()),
        "communication_delay_s": DEFAULT_COMMUNICATION_DELAY,
        "time_gap_s": per_mode(|c| c.default_time_gap().into()),
        "leader_position_ft": DEFAULT_LEADER_POSITION,
        "placement": Placement::default(),
        "transient_exclusion_s": DEFAULT_TRANSIENT_EXCLUSION,
        "time_gap_min_speed_fps": DEFAULT_TIME_GAP_MIN_SPEED,
        "schedule_units": SpeedUnits::default(),
        "output": OutputConfig::default(),
    })
}
