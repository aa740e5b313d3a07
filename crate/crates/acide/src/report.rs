//! CSV and JSON emission for every subcommand.
//!
//! Raw mode prints SI values (bps, seconds, bits) at full precision — the
//! shortest digit strings that round-trip, so identical runs are
//! byte-identical. Paper-display mode floors bandwidths to 3 decimals of
//! kbps, times to whole milliseconds, and sizes to whole bits; column headers
//! switch their unit suffix accordingly. Phase-1 times in display mode are
//! shown as the remainder of the floored delay bound after the other floored
//! phases, so the displayed phases always add up to the displayed bound.
//!
//! JSON output always carries raw SI values; the display flag only shapes
//! CSV.

use crate::admission::AdmissionResult;
use crate::dynamic::{DynamicPlan, StreamPlan};
use crate::model::{Cluster, Peer, StreamParams};
use crate::optimizer::Allocation;
use crate::scenario::SweepResultRow;
use crate::schedule::{event_duration, ScheduleReport};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplayMode {
    /// SI units, full precision.
    Raw,
    /// kbps floored to 3 decimals, whole milliseconds, whole bits.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn raw(v: f64) -> String {
    format!("{}", v)
}

/// Floor to 3 decimals of kbps via integer arithmetic on whole bps.
fn kbps_floor3(bps: f64) -> String {
    let whole_bps = bps.floor() as i64;
    format!("{}.{:03}", whole_bps / 1000, whole_bps % 1000)
}

fn ms_floor(seconds: f64) -> i64 {
    (seconds * 1000.0).floor() as i64
}

fn bits_floor(bits: f64) -> i64 {
    bits.floor() as i64
}

fn bw_cell(bps: f64, mode: DisplayMode) -> String {
    match mode {
        DisplayMode::Raw => raw(bps),
        DisplayMode::Paper => kbps_floor3(bps),
    }
}

fn time_cell(seconds: f64, mode: DisplayMode) -> String {
    match mode {
        DisplayMode::Raw => raw(seconds),
        DisplayMode::Paper => ms_floor(seconds).to_string(),
    }
}

fn bits_cell(bits: f64, mode: DisplayMode) -> String {
    match mode {
        DisplayMode::Raw => raw(bits),
        DisplayMode::Paper => bits_floor(bits).to_string(),
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn optimize_csv(cluster: &Cluster, alloc: &Allocation, mode: DisplayMode) -> String {
    let bwu = match mode {
        DisplayMode::Raw => "bps",
        DisplayMode::Paper => "kbps",
    };
    let mut out = format!("peer_id,u_{bwu},d_{bwu},block_bits,bw_{bwu}\n");
    for (i, peer) in cluster.peers.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            peer.id,
            bw_cell(peer.upload_bps, mode),
            bw_cell(peer.download_bps, mode),
            bits_cell(alloc.block_bits[i], mode),
            bw_cell(alloc.peer_bw_bps[i], mode),
        ));
    }
    out.push_str(&format!(
        "total,,,{},{}\n",
        bits_cell(cluster.stream.package_bits, mode),
        bw_cell(alloc.total_bw_bps, mode),
    ));
    let (t1, t2) = display_phase_pair(alloc.phase1_s, alloc.phase2_s, &cluster.stream, mode);
    out.push_str(&format!("phase,{},{}\n", t1, t2));
    out
}

/// Display rule for the two-phase split: the exchange time floors on its
/// own; the download time is the floored bound minus the floored exchange
/// time, so the display stays additive.
fn display_phase_pair(
    phase1_s: f64,
    phase2_s: f64,
    stream: &StreamParams,
    mode: DisplayMode,
) -> (String, String) {
    match mode {
        DisplayMode::Raw => (raw(phase1_s), raw(phase2_s)),
        DisplayMode::Paper => {
            let t2 = ms_floor(phase2_s);
            let t1 = ms_floor(stream.delay_bound_s) - t2;
            (t1.to_string(), t2.to_string())
        }
    }
}

pub fn optimize_json(cluster: &Cluster, alloc: &Allocation) -> Value {
    let peers: Vec<Value> = cluster
        .peers
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "peer_id": p.id,
                "u_bps": p.upload_bps,
                "d_bps": p.download_bps,
                "block_bits": alloc.block_bits[i],
                "bw_bps": alloc.peer_bw_bps[i],
            })
        })
        .collect();
    json!({
        "peers": peers,
        "package_bits": cluster.stream.package_bits,
        "total_bw_bps": alloc.total_bw_bps,
        "T1_s": alloc.phase1_s,
        "T2_s": alloc.phase2_s,
        "a3_violated": alloc.a3_violated,
    })
}

pub fn admit_csv(users: &[Peer], result: &AdmissionResult, mode: DisplayMode) -> String {
    let bwu = match mode {
        DisplayMode::Raw => "bps",
        DisplayMode::Paper => "kbps",
    };
    let mut out = format!("peer_id,u_{bwu},d_{bwu},admitted\n");
    for user in users {
        let admitted = result.admitted.iter().any(|p| p.id == user.id);
        out.push_str(&format!(
            "{},{},{},{}\n",
            user.id,
            bw_cell(user.upload_bps, mode),
            bw_cell(user.download_bps, mode),
            admitted,
        ));
    }
    out.push_str(&format!("n,bw_{bwu},BW_{bwu},iterations\n"));
    out.push_str(&format!(
        "{},{},{},{}\n",
        result.admitted.len(),
        bw_cell(result.allocation.total_bw_bps, mode),
        bw_cell(result.reserved_bw_bps, mode),
        result.iterations,
    ));
    out
}

pub fn admit_json(users: &[Peer], result: &AdmissionResult) -> Value {
    let rows: Vec<Value> = users
        .iter()
        .map(|u| {
            json!({
                "peer_id": u.id,
                "u_bps": u.upload_bps,
                "d_bps": u.download_bps,
                "admitted": result.admitted.iter().any(|p| p.id == u.id),
            })
        })
        .collect();
    json!({
        "users": rows,
        "n": result.admitted.len(),
        "bw_bps": result.allocation.total_bw_bps,
        "BW_bps": result.reserved_bw_bps,
        "iterations": result.iterations,
        "removed_ids": result.removed.iter().map(|p| p.id).collect::<Vec<_>>(),
    })
}

pub fn plan_csv(stream_plan: &StreamPlan, stream: &StreamParams, mode: DisplayMode) -> String {
    let (bwu, tu) = match mode {
        DisplayMode::Raw => ("bps", "s"),
        DisplayMode::Paper => ("kbps", "ms"),
    };
    let mut out =
        format!("package,n,notif_bits,T0_{tu},T1_{tu},T2_{tu},bw0_{bwu},bw1_{bwu},changed\n");
    for plan in &stream_plan.plans {
        let (t0, t1, t2) = display_phase_triple(plan, stream, mode);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            plan.package_index,
            plan.block_bits.len(),
            bits_cell(plan.notification_bits, mode),
            t0,
            t1,
            t2,
            bw_cell(plan.bw0_bps, mode),
            bw_cell(plan.bw1_bps, mode),
            plan.changed,
        ));
    }
    if let Some((package, error)) = &stream_plan.halted {
        out.push_str("halted_package,error\n");
        out.push_str(&format!("{},{}\n", package, csv_quote(error)));
    }
    out
}

fn display_phase_triple(
    plan: &DynamicPlan,
    stream: &StreamParams,
    mode: DisplayMode,
) -> (String, String, String) {
    match mode {
        DisplayMode::Raw => (raw(plan.phase0_s), raw(plan.phase1_s), raw(plan.phase2_s)),
        DisplayMode::Paper => {
            let t0 = ms_floor(plan.phase0_s);
            let t2 = ms_floor(plan.phase2_s);
            let t1 = ms_floor(stream.delay_bound_s) - t0 - t2;
            (t0.to_string(), t1.to_string(), t2.to_string())
        }
    }
}

pub fn plan_json(stream_plan: &StreamPlan) -> Value {
    let plans: Vec<Value> = stream_plan
        .plans
        .iter()
        .map(|p| {
            json!({
                "package": p.package_index,
                "n": p.block_bits.len(),
                "notif_bits": p.notification_bits,
                "T0_s": p.phase0_s,
                "T1_s": p.phase1_s,
                "T2_s": p.phase2_s,
                "bw0_bps": p.bw0_bps,
                "bw1_bps": p.bw1_bps,
                "changed": p.changed,
            })
        })
        .collect();
    match &stream_plan.halted {
        Some((package, error)) => json!({
            "plans": plans,
            "halted_package": package,
            "error": error,
        }),
        None => json!({ "plans": plans }),
    }
}

pub fn sweep_csv(rows: &[SweepResultRow], mode: DisplayMode) -> String {
    let (bwu, tu) = match mode {
        DisplayMode::Raw => ("bps", "s"),
        DisplayMode::Paper => ("kbps", "ms"),
    };
    let mut out = format!("n,ratio_{bwu},u_avg_{bwu},bw_{bwu},T1_{tu},T2_{tu},feasible\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            bw_cell(row.ratio_bps, mode),
            bw_cell(row.u_avg_bps, mode),
            bw_cell(row.total_bw_bps, mode),
            time_cell(row.phase1_s, mode),
            time_cell(row.phase2_s, mode),
            row.feasible,
        ));
    }
    out
}

pub fn sweep_json(rows: &[SweepResultRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "ratio_bps": r.ratio_bps,
                "u_avg_bps": r.u_avg_bps,
                "bw_bps": r.total_bw_bps,
                "T1_s": r.phase1_s,
                "T2_s": r.phase2_s,
                "feasible": r.feasible,
            })
        })
        .collect();
    json!({ "rows": rows })
}

pub fn simulate_csv(
    cluster: &Cluster,
    block_bits: &[f64],
    peer_bw_bps: &[f64],
    report: &ScheduleReport,
    mode: DisplayMode,
) -> String {
    let tu = match mode {
        DisplayMode::Raw => "s",
        DisplayMode::Paper => "ms",
    };
    let mut out = format!("phase,step,sender,receiver,block,mode,duration_{tu}\n");
    for event in &report.events {
        let duration = event_duration(cluster, block_bits, peer_bw_bps, event);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            event.phase,
            event.step,
            event.sender,
            event.receiver,
            event.block,
            event.mode,
            time_cell(duration, mode),
        ));
    }
    out.push_str(&format!(
        "phase1_{tu},phase2_{tu},completion_{tu},violations\n"
    ));
    out.push_str(&format!(
        "{},{},{},{}\n",
        time_cell(report.phase1_s, mode),
        time_cell(report.phase2_s, mode),
        time_cell(report.completion_s, mode),
        report.violations.len(),
    ));
    if !report.violations.is_empty() {
        out.push_str("violation\n");
        for violation in &report.violations {
            out.push_str(&format!("{}\n", csv_quote(&violation.to_string())));
        }
    }
    out
}

pub fn simulate_json(
    cluster: &Cluster,
    block_bits: &[f64],
    peer_bw_bps: &[f64],
    report: &ScheduleReport,
) -> Value {
    let events: Vec<Value> = report
        .events
        .iter()
        .map(|e| {
            json!({
                "phase": e.phase.to_string(),
                "step": e.step,
                "sender": e.sender.to_string(),
                "receiver": e.receiver,
                "block": e.block,
                "mode": e.mode.to_string(),
                "duration_s": event_duration(cluster, block_bits, peer_bw_bps, e),
            })
        })
        .collect();
    json!({
        "events": events,
        "phase1_s": report.phase1_s,
        "phase2_s": report.phase2_s,
        "completion_s": report.completion_s,
        "step_durations_s": report.step_durations_s,
        "violations": report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{StreamParams, Topology};
    use crate::optimizer::minimize_bandwidth;
    use crate::schedule::simulate;

    fn worked_cluster() -> Cluster {
        let peers = [15.0, 17.0, 18.0, 19.0, 20.0]
            .iter()
            .enumerate()
            .map(|(i, &u)| Peer::new(i as u32 + 1, 20e3, u * 1e3).unwrap())
            .collect();
        Cluster::new(peers, StreamParams::new(2000.0, 0.2).unwrap()).unwrap()
    }

    #[test]
    fn optimize_paper_display_floors_to_presentation_units() {
        let cluster = worked_cluster();
        let alloc = minimize_bandwidth(&cluster).unwrap();
        let csv = optimize_csv(&cluster, &alloc, DisplayMode::Paper);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "peer_id,u_kbps,d_kbps,block_bits,bw_kbps");
        assert_eq!(lines[1], "1,15.000,20.000,337,3.061");
        assert_eq!(lines[2], "2,17.000,20.000,382,3.469");
        assert_eq!(lines[3], "3,18.000,20.000,404,3.673");
        assert_eq!(lines[4], "4,19.000,20.000,426,3.877");
        assert_eq!(lines[5], "5,20.000,20.000,449,4.081");
        assert_eq!(lines[6], "total,,,2000,18.163");
        assert_eq!(lines[7], "phase,111,89");
    }

    #[test]
    fn optimize_raw_round_trips_exactly() {
        let cluster = worked_cluster();
        let alloc = minimize_bandwidth(&cluster).unwrap();
        let csv = optimize_csv(&cluster, &alloc, DisplayMode::Raw);
        let line1: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let parsed: f64 = line1[3].parse().unwrap();
        assert_eq!(parsed, alloc.block_bits[0]);
    }

    #[test]
    fn kbps_flooring() {
        assert_eq!(kbps_floor3(18163.26530612245), "18.163");
        assert_eq!(kbps_floor3(3061.224489795918), "3.061");
        assert_eq!(kbps_floor3(999.9), "0.999");
        assert_eq!(kbps_floor3(12000.0), "12.000");
    }

    #[test]
    fn simulate_csv_has_events_and_summary() {
        let cluster = worked_cluster();
        let alloc = minimize_bandwidth(&cluster).unwrap();
        let report = simulate(
            &cluster,
            &alloc.block_bits,
            &alloc.peer_bw_bps,
            Topology::Mesh,
        )
        .unwrap();
        let csv = simulate_csv(
            &cluster,
            &alloc.block_bits,
            &alloc.peer_bw_bps,
            &report,
            DisplayMode::Raw,
        );
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "phase,step,sender,receiver,block,mode,duration_s");
        assert!(lines[1].starts_with("1,0,bs,1,1,unicast,"));
        // 5 phase-1 + 20 phase-2 events + header + summary pair.
        assert_eq!(lines.len(), 1 + 25 + 2);
        assert!(lines[26].starts_with("phase1_s,phase2_s,completion_s,violations"));
        assert!(lines[27].ends_with(",0"));
    }

    #[test]
    fn json_outputs_are_deterministic() {
        let cluster = worked_cluster();
        let alloc = minimize_bandwidth(&cluster).unwrap();
        let a = serde_json::to_string_pretty(&optimize_json(&cluster, &alloc)).unwrap();
        let b = serde_json::to_string_pretty(&optimize_json(&cluster, &alloc)).unwrap();
        assert_eq!(a, b);
    }
}
