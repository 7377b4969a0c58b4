//! CSV catalog ingestion.
//!
//! A catalog is two files: the vehicle table and a torque sidecar
//! (`<stem>.torque.csv`, columns `engine_id,rpm,torque_lbft`) keyed by
//! vehicle id. Idle and maximum engine speed are the first and last knot of
//! each torque map.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    CatalogError, EngineSpec, Gear, TorqueKnot, TransmissionSpec, VehicleSpec,
    DEFAULT_CG_HEIGHT_RATIO, DEFAULT_REAR_AXLE_RATIO, DEFAULT_WHEELBASE_RATIO,
};

pub const CATALOG_HEADER: &str = "id,name,fleet_type,fhwa_class,length_ft,width_ft,height_ft,weight_lb,wheel_radius_ft,drag_coeff,drivetrain,slippage,efficiency,diff_ratio,gears,displacement_l,wheelbase_ratio,cg_height_ratio";
pub const TORQUE_HEADER: &str = "engine_id,rpm,torque_lbft";

#[derive(Debug, Deserialize)]
struct CatalogRow {
    id: u32,
    name: String,
    fleet_type: String,
    fhwa_class: u8,
    length_ft: f64,
    width_ft: f64,
    height_ft: f64,
    weight_lb: f64,
    wheel_radius_ft: f64,
    drag_coeff: f64,
    drivetrain: String,
    slippage: f64,
    efficiency: f64,
    diff_ratio: f64,
    gears: String,
    #[serde(default)]
    displacement_l: Option<f64>,
    #[serde(default)]
    wheelbase_ratio: Option<f64>,
    #[serde(default)]
    cg_height_ratio: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct TorqueRow {
    engine_id: u32,
    rpm: f64,
    torque_lbft: f64,
}

fn parse_error(row: usize, message: impl Into<String>) -> CatalogError {
    CatalogError::Parse {
        row,
        message: message.into(),
    }
}

fn csv_row(err: &csv::Error) -> usize {
    err.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_gears(text: &str, row: usize) -> Result<Vec<Gear>, CatalogError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| {
            let parts: Vec<&str> = entry.split('/').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(parse_error(
                    row,
                    format!("gear `{entry}` is not ratio/up_mph/down_mph"),
                ));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| parse_error(row, format!("gear `{entry}`: bad number `{s}`")))
            };
            Ok(Gear {
                ratio: num(parts[0])?,
                shift_up_speed: num(parts[1])?,
                shift_down_speed: num(parts[2])?,
            })
        })
        .collect()
}

/// Parses a torque sidecar into maps keyed by engine (vehicle) id.
/// Knots are kept in file order; validation happens with the vehicle.
pub fn parse_torque_maps(text: &str) -> Result<BTreeMap<u32, Vec<TorqueKnot>>, CatalogError> {
    let mut maps: BTreeMap<u32, Vec<TorqueKnot>> = BTreeMap::new();
    if text.trim().is_empty() {
        return Ok(maps);
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    for result in reader.deserialize::<TorqueRow>() {
        let row = result.map_err(|e| parse_error(csv_row(&e), e.to_string()))?;
        maps.entry(row.engine_id).or_default().push(TorqueKnot {
            rpm: row.rpm,
            torque: row.torque_lbft,
        });
    }
    Ok(maps)
}

/// Parses and validates a vehicle catalog against its torque maps.
/// An empty catalog yields an empty list.
pub fn parse_catalog(
    catalog: &str,
    torque_maps: &BTreeMap<u32, Vec<TorqueKnot>>,
) -> Result<Vec<VehicleSpec>, CatalogError> {
    if catalog.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(catalog.as_bytes());
    let mut specs = Vec::new();
    for result in reader.deserialize::<CatalogRow>() {
        let raw = result.map_err(|e| parse_error(csv_row(&e), e.to_string()))?;
        let row = specs.len() + 2;
        let fleet_type = raw.fleet_type.parse().map_err(|m| parse_error(row, m))?;
        let drivetrain = raw.drivetrain.parse().map_err(|m| parse_error(row, m))?;
        let gears = parse_gears(&raw.gears, row)?;
        let torque_map = torque_maps
            .get(&raw.id)
            .cloned()
            .ok_or(CatalogError::MissingTorqueMap { id: raw.id })?;
        let idle_speed = torque_map.first().map_or(0.0, |k| k.rpm);
        let max_speed = torque_map.last().map_or(0.0, |k| k.rpm);
        let spec = VehicleSpec {
            id: raw.id,
            name: raw.name,
            fleet_type,
            fhwa_class: raw.fhwa_class,
            length: raw.length_ft,
            width: raw.width_ft,
            height: raw.height_ft,
            weight: raw.weight_lb,
            wheel_radius: raw.wheel_radius_ft,
            drag_coefficient: raw.drag_coeff,
            drivetrain,
            engine: EngineSpec {
                displacement: raw.displacement_l.unwrap_or(0.0),
                idle_speed,
                max_speed,
                torque_map,
            },
            transmission: TransmissionSpec {
                axle_slippage: raw.slippage,
                drivetrain_efficiency: raw.efficiency,
                differential_ratio: raw.diff_ratio,
                gears,
            },
            wheelbase_ratio: raw.wheelbase_ratio.unwrap_or(DEFAULT_WHEELBASE_RATIO),
            cg_height_ratio: raw.cg_height_ratio.unwrap_or(DEFAULT_CG_HEIGHT_RATIO),
            rear_axle_ratio: DEFAULT_REAR_AXLE_RATIO,
        };
        spec.validate()?;
        specs.push(spec);
    }
    Ok(specs)
}

pub fn serialize_catalog(specs: &[VehicleSpec]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(CATALOG_HEADER.split(','))
        .expect("in-memory write");
    for s in specs {
        let gears = s
            .transmission
            .gears
            .iter()
            .map(|g| format!("{}/{}/{}", g.ratio, g.shift_up_speed, g.shift_down_speed))
            .collect::<Vec<_>>()
            .join(";");
        writer
            .write_record([
                s.id.to_string(),
                s.name.clone(),
                s.fleet_type.to_string(),
                s.fhwa_class.to_string(),
                s.length.to_string(),
                s.width.to_string(),
                s.height.to_string(),
                s.weight.to_string(),
                s.wheel_radius.to_string(),
                s.drag_coefficient.to_string(),
                s.drivetrain.to_string(),
                s.transmission.axle_slippage.to_string(),
                s.transmission.drivetrain_efficiency.to_string(),
                s.transmission.differential_ratio.to_string(),
                gears,
                s.engine.displacement.to_string(),
                s.wheelbase_ratio.to_string(),
                s.cg_height_ratio.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn serialize_torque_maps(specs: &[VehicleSpec]) -> String {
    let mut out = String::from(TORQUE_HEADER);
    out.push('\n');
    for s in specs {
        for k in &s.engine.torque_map {
            out.push_str(&format!("{},{},{}\n", s.id, k.rpm, k.torque));
        }
    }
    out
}

/// `fleet.csv` -> `fleet.torque.csv`.
pub fn torque_sidecar_path(catalog: &Path) -> PathBuf {
    let stem = catalog
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    catalog.with_file_name(format!("{stem}.torque.csv"))
}

/// Reads a catalog and its torque sidecar from disk.
pub fn load_catalog(path: &Path) -> Result<Vec<VehicleSpec>, CatalogError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|e| CatalogError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })
    };
    let catalog = read(path)?;
    let sidecar = torque_sidecar_path(path);
    let maps = if sidecar.exists() {
        parse_torque_maps(&read(&sidecar)?)?
    } else {
        BTreeMap::new()
    };
    parse_catalog(&catalog, &maps)
}
