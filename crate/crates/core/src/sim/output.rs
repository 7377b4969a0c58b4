//! Trace, summary and plot-data writers. All numbers use fixed precision so
//! identical traces serialize to identical bytes.

use std::collections::BTreeMap;
use std::io::{self, Write};

use super::engine::Trace;
use super::summary::VehicleSummary;

pub const TRACE_HEADER: &str =
    "t,vehicle_id,mode,x_ft,v_fps,a_fps2,gear,amax_fps2,dmax_fps2,gap_ft,timegap_s,smin_ft,tmin_s,kp,ki,kd,flag";
pub const PLOT_HEADER: &str = "t,v_fps,leader_v_fps,amax_fps2,dmax_fps2,timegap_s";

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn time(t: f64) -> String {
    format!("{t:.3}")
}

pub fn write_trace_csv<W: Write>(trace: &Trace, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for (k, step) in trace.steps.iter().enumerate() {
        let t = time(trace.times[k]);
        for (i, s) in step.iter().enumerate() {
            let (kp, ki, kd) = s.gains.active(s.law);
            writeln!(
                out,
                "{t},{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.law.as_str(),
                num(s.x),
                num(s.v),
                num(s.a),
                s.gear,
                num(s.dynamics.a_max),
                num(s.dynamics.d_max),
                opt(s.gap),
                opt(s.time_gap),
                opt(s.s_min),
                opt(s.t_min),
                opt(kp),
                opt(ki),
                opt(kd),
                s.flag,
            )?;
        }
    }
    Ok(())
}

pub fn trace_csv_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii csv")
}

/// Speed, a_max, d_max and time gap against time for follower `i`.
pub fn write_plot_csv<W: Write>(trace: &Trace, i: usize, mut out: W) -> io::Result<()> {
    writeln!(out, "{PLOT_HEADER}")?;
    for (k, step) in trace.steps.iter().enumerate() {
        let s = &step[i];
        let leader_v = if i == 0 {
            trace.schedule_speed[k]
        } else {
            step[i - 1].v
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            time(trace.times[k]),
            num(s.v),
            num(leader_v),
            num(s.dynamics.a_max),
            num(s.dynamics.d_max),
            opt(s.time_gap),
        )?;
    }
    Ok(())
}

pub fn summary_json(summary: &BTreeMap<usize, VehicleSummary>) -> String {
    let keyed: BTreeMap<String, &VehicleSummary> =
        summary.iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut s = serde_json::to_string_pretty(&keyed).expect("summary serializes");
    s.push('\n');
    s
}
