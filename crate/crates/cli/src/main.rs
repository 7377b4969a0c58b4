//! `longsim` command-line front end.
//!
//! Exit codes: 0 clean, 1 configuration or input error, 2 a run recorded a
//! collision.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use longsim::fleet::{load_catalog, Fleet};
use longsim::schedule::{parse_schedule, SpeedUnits};
use longsim::sim::{run_on_threads, summary_json, write_plot_csv, write_trace_csv};
use longsim::{summarize, VehicleSpec};

use config::{defaults, LoadedConfig, FLEET_PATH_VAR};

const EXIT_ERROR: u8 = 1;
const EXIT_COLLISION: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "longsim",
    version,
    about = "Dynamics-limited longitudinal traffic simulation"
)]
struct Cli {
    /// Print every default value as JSON and exit.
    #[arg(long, global = true)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario config and write trace, summary and plot data.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output.dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Keep simulating after a collision instead of halting.
        #[arg(long)]
        continue_on_collision: bool,
        /// Worker threads for per-vehicle evaluation.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Inspect the vehicle catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Summary statistics of a schedule file.
    ScheduleStats {
        file: PathBuf,
        #[arg(long, default_value = "mph")]
        units: SpeedUnits,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    Show { id: u32 },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    if cli.print_defaults {
        println!("{}", serde_json::to_string_pretty(&defaults())?);
        return Ok(0);
    }
    match cli.command {
        None => {
            eprintln!("error: no command given (try --help)");
            Ok(EXIT_ERROR)
        }
        Some(Command::Run {
            config,
            out_dir,
            continue_on_collision,
            threads,
        }) => cmd_run(&config, out_dir, continue_on_collision, threads),
        Some(Command::Catalog { action }) => cmd_catalog(action),
        Some(Command::ScheduleStats { file, units }) => cmd_schedule_stats(&file, units),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_run(
    path: &Path,
    out_dir: Option<PathBuf>,
    continue_on_collision: bool,
    threads: usize,
) -> Result<u8> {
    let mut loaded = LoadedConfig::read(path)?;
    loaded.config.continue_on_collision |= continue_on_collision;
    let sc = loaded.scenario()?;
    let trace = run_on_threads(&sc, threads.max(1))?;

    let dir = out_dir.unwrap_or_else(|| loaded.output_dir());
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let out = &loaded.config.output;

    let mut w = create(&dir.join(&out.trace))?;
    write_trace_csv(&trace, &mut w)?;
    w.flush()?;

    let summary = summarize(&trace);
    std::fs::write(dir.join(&out.summary), summary_json(&summary))
        .with_context(|| format!("writing {}", dir.join(&out.summary).display()))?;

    for i in 1..trace.vehicles.len() {
        let mut w = create(&dir.join(format!("{}{i}.csv", out.plot_prefix)))?;
        write_plot_csv(&trace, i, &mut w)?;
        w.flush()?;
    }

    if trace.collisions.is_empty() {
        Ok(0)
    } else {
        for c in &trace.collisions {
            eprintln!(
                "collision: vehicle {} at t = {:.3} s (gap {:.3} ft)",
                c.vehicle, c.t, c.gap
            );
        }
        Ok(EXIT_COLLISION)
    }
}

fn catalog() -> Result<Vec<VehicleSpec>> {
    match std::env::var_os(FLEET_PATH_VAR) {
        Some(p) => {
            let p = PathBuf::from(p);
            load_catalog(&p).with_context(|| format!("loading catalog {}", p.display()))
        }
        None => Ok(Fleet::builtin().vehicles().to_vec()),
    }
}

fn cmd_catalog(action: CatalogAction) -> Result<u8> {
    let specs = catalog()?;
    match action {
        CatalogAction::List => {
            println!(
                "{:>3}  {:<32} {:<17} {:>4} {:>9} {:>9} {:>5} {:>11}",
                "id", "name", "type", "fhwa", "length_ft", "weight_lb", "gears", "torque_lbft"
            );
            for s in &specs {
                println!(
                    "{:>3}  {:<32} {:<17} {:>4} {:>9.2} {:>9.0} {:>5} {:>11.1}",
                    s.id,
                    s.name,
                    s.fleet_type.as_str(),
                    s.fhwa_class,
                    s.length,
                    s.weight,
                    s.transmission.gear_count(),
                    s.engine.peak_torque().torque
                );
            }
            Ok(0)
        }
        CatalogAction::Show { id } => {
            let Some(s) = specs.iter().find(|s| s.id == id) else {
                eprintln!("error: unknown vehicle id {id}");
                return Ok(EXIT_ERROR);
            };
            print!("{}", describe(s));
            Ok(0)
        }
    }
}

fn describe(s: &VehicleSpec) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k:<24}{v}\n"));
    line("id", s.id.to_string());
    line("name", s.name.clone());
    line("type", s.fleet_type.as_str().into());
    line("fhwa_class", s.fhwa_class.to_string());
    line("length", format!("{} ft", s.length));
    line("width", format!("{} ft", s.width));
    line("height", format!("{} ft", s.height));
    line("weight", format!("{} lb", s.weight));
    line("wheel_radius", format!("{} ft", s.wheel_radius));
    line("drag_coefficient", s.drag_coefficient.to_string());
    line("drivetrain", s.drivetrain.as_str().into());
    line("wheelbase", format!("{:.3} ft", s.wheelbase()));
    line("cg_height", format!("{:.3} ft", s.cg_height()));
    line("displacement", format!("{} L", s.engine.displacement));
    line("idle_speed", format!("{} rpm", s.engine.idle_speed));
    line("max_speed", format!("{} rpm", s.engine.max_speed));
    let t = &s.transmission;
    line("axle_slippage", t.axle_slippage.to_string());
    line("drivetrain_efficiency", t.drivetrain_efficiency.to_string());
    line("differential_ratio", t.differential_ratio.to_string());
    for (i, g) in t.gears.iter().enumerate() {
        line(
            &format!("gear {}", i + 1),
            format!(
                "ratio {} shift_down {} mph shift_up {} mph",
                g.ratio, g.shift_down_speed, g.shift_up_speed
            ),
        );
    }
    for k in &s.engine.torque_map {
        line("torque", format!("{} rpm {:.2} lb-ft", k.rpm, k.torque));
    }
    out
}

fn cmd_schedule_stats(path: &Path, units: SpeedUnits) -> Result<u8> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let schedule =
        parse_schedule(&text, units, &name).with_context(|| format!("{}", path.display()))?;
    let stats = schedule.stats()?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(0)
}
