//! File outputs: telemetry CSV, event log JSONL, and the JSON reports.
//!
//! Every writer goes through [`write_atomic`]: content lands in a sibling
//! temp file first and is renamed into place, so an aborted process leaves
//! either the previous file or nothing, never a truncated one.
//!
//! The CSV writer is hand-rolled on purpose: the format is a fixed 35
//! columns, floats are printed with Rust's shortest round-trip `Display`,
//! and no quoting can ever be needed, so a dependency would only add a
//! second opinion on formatting.

use crate::analysis::{EnvelopeReport, J2Report, StabilityConstants};
use crate::error::Result;
use crate::sim::{RunRecord, SummaryMetrics, TelemetrySample};
use crate::trigger::{EventRecord, TriggerMode};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Column order of the telemetry CSV; one row per integration step.
pub const TELEMETRY_HEADER: &str = "t,q_ev_x,q_ev_y,q_ev_z,q_e0,\
omega_s_x,omega_s_y,omega_s_z,omega_e_x,omega_e_y,omega_e_z,\
omega_v_x,omega_v_y,omega_v_z,z2_x,z2_y,z2_z,\
tau_x,tau_y,tau_z,tau_e_x,tau_e_y,tau_e_z,u_x,u_y,u_z,\
e_tau_sq,xi_x,xi_y,xi_z,V1,V2,V3,J2,mode";

/// Render telemetry as CSV. Floats use `Display`, which round-trips.
pub fn telemetry_csv(rows: &[TelemetrySample]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 220);
    out.push_str(TELEMETRY_HEADER);
    out.push('\n');
    for s in rows {
        let mode = if s.mode == TriggerMode::On { "ON" } else { "OFF" };
        let f = &mut out;
        push_num(f, s.t);
        push_vec(f, &s.q_ev.0);
        push_num_sep(f, s.q_e0);
        push_vec(f, &s.omega_s.0);
        push_vec(f, &s.omega_e.0);
        push_vec(f, &s.omega_v.0);
        push_vec(f, &s.z2.0);
        push_vec(f, &s.tau.0);
        push_vec(f, &s.tau_e.0);
        push_vec(f, &s.u.0);
        push_num_sep(f, s.e_tau_sq);
        push_vec(f, &s.xi.0);
        push_num_sep(f, s.v1);
        push_num_sep(f, s.v2);
        push_num_sep(f, s.v3);
        push_num_sep(f, s.j2);
        f.push(',');
        f.push_str(mode);
        f.push('\n');
    }
    out
}

fn push_num(out: &mut String, v: f64) {
    use std::fmt::Write;
    write!(out, "{v}").expect("string write");
}

fn push_num_sep(out: &mut String, v: f64) {
    out.push(',');
    push_num(out, v);
}

fn push_vec(out: &mut String, v: &[f64; 3]) {
    for &c in v {
        push_num_sep(out, c);
    }
}

/// One JSON object per line, in event order.
pub fn events_jsonl(events: &[EventRecord]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    out
}

/// Pretty-printed JSON document with a trailing newline.
pub fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

/// Write through a sibling temp file plus rename, so the destination is
/// never observable half-written.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Standard run output set: telemetry.csv, events.jsonl, summary.json.
pub fn write_run_outputs(dir: &Path, record: &RunRecord) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("telemetry.csv"), &telemetry_csv(&record.telemetry))?;
    write_atomic(&dir.join("events.jsonl"), &events_jsonl(&record.events))?;
    write_atomic(&dir.join("summary.json"), &pretty_json(&record.summary))?;
    Ok(())
}

/// Intermittent-vs-periodic comparison record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub intermittent: SummaryMetrics,
    pub periodic: SummaryMetrics,
    /// Intermittent action count over the baseline's; absent when the
    /// baseline never acted.
    pub action_ratio: Option<f64>,
    /// Final pointing error difference, intermittent minus baseline, deg.
    pub accuracy_delta_deg: f64,
}

impl ComparisonReport {
    pub fn new(intermittent: SummaryMetrics, periodic: SummaryMetrics) -> ComparisonReport {
        let action_ratio = if periodic.action_count > 0 {
            Some(intermittent.action_count as f64 / periodic.action_count as f64)
        } else {
            None
        };
        let accuracy_delta_deg =
            intermittent.pointing_error_final_deg - periodic.pointing_error_final_deg;
        ComparisonReport { intermittent, periodic, action_ratio, accuracy_delta_deg }
    }
}

/// Certificate residual levels: the ON-anchored and OFF-anchored ultimate
/// bounds and their maximum, which the trajectory must ultimately respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualBounds {
    pub r_on: f64,
    pub r_off: f64,
    pub r_final: f64,
}

/// Everything the certificate check produced for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub constants: StabilityConstants,
    pub residuals: ResidualBounds,
    /// The scalar-attitude floor the constants were evaluated with (the
    /// initial |q_e0|, clamped into (0, 1]).
    pub q_e0_min_used: f64,
    /// Smallest |q_e0| the run actually visited.
    pub q_e0_min_observed: f64,
    pub envelope: EnvelopeReport,
    pub j2: J2Report,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::Vec3;
    use crate::trigger::EventKind;

    fn sample(t: f64) -> TelemetrySample {
        TelemetrySample {
            t,
            q_ev: Vec3([0.1, -0.25, 1e-7]),
            q_e0: 0.9617,
            omega_s: Vec3([0.01, 0.02, -0.03]),
            omega_e: Vec3([0.001, 0.0, -0.002]),
            omega_v: Vec3([-0.0005, 0.0033, 0.0]),
            z2: Vec3([0.0015, -0.0033, -0.002]),
            tau: Vec3([-0.14, 0.02, 0.003]),
            tau_e: Vec3([-0.14, 0.02, 0.003]),
            u: Vec3([-0.05, 0.02, 0.003]),
            e_tau_sq: 0.0,
            xi: Vec3([0.0, 0.0, 0.0]),
            v1: 0.036,
            v2: 1.4e-4,
            v3: 0.0,
            j2: 1.4e-3,
            mode: TriggerMode::On,
        }
    }

    #[test]
    fn header_has_35_columns_and_rows_align() {
        assert_eq!(TELEMETRY_HEADER.split(',').count(), 35);
        let text = telemetry_csv(&[sample(0.0), sample(0.1)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        for line in &lines {
            assert_eq!(line.split(',').count(), 35, "bad line: {line}");
        }
        assert!(lines[1].ends_with(",ON"));
    }

    #[test]
    fn csv_floats_round_trip() {
        let s = sample(12.300000000000001);
        let text = telemetry_csv(&[s]);
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), s.t);
        assert_eq!(row[1].parse::<f64>().unwrap(), s.q_ev[0]);
        assert_eq!(row[3].parse::<f64>().unwrap(), s.q_ev[2]);
        assert_eq!(row[4].parse::<f64>().unwrap(), s.q_e0);
        assert_eq!(row[26].parse::<f64>().unwrap(), s.e_tau_sq);
        assert_eq!(row[33].parse::<f64>().unwrap(), s.j2);
    }

    #[test]
    fn events_lines_parse_back() {
        let events = vec![
            EventRecord { t: 15.0, kind: EventKind::TurnOn, trigger_value: 2.39e-4, threshold: 2.31e-4 },
            EventRecord {
                t: 15.2,
                kind: EventKind::TurnOffActive,
                trigger_value: 7.6e-3,
                threshold: 4.9e-3,
            },
        ];
        let text = events_jsonl(&events);
        let parsed: Vec<EventRecord> =
            text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(parsed, events);
        assert!(text.contains("\"TURN_ON\""));
        assert!(text.contains("\"TURN_OFF_ACTIVE\""));
    }

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = std::env::temp_dir().join(format!("etic-out-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("file.txt");
        write_atomic(&path, "one\n").unwrap();
        write_atomic(&path, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two\n");
        assert!(!dir.join("file.txt.tmp").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn comparison_report_ratio_and_delta() {
        let mut a = SummaryMetrics {
            action_count: 30,
            pointing_error_final_deg: 5.0,
            pointing_error_max_after_100s_deg: 17.0,
            max_omega_s: 0.03,
            on_time_total: 44.0,
            trigger_counts: crate::sim::TriggerCounts {
                turn_on: 30,
                turn_off_active: 30,
                turn_off_passive: 0,
            },
            envelope_violations: Some(0),
        };
        let mut b = a.clone();
        b.action_count = 150;
        b.pointing_error_final_deg = 4.0;
        let report = ComparisonReport::new(a.clone(), b.clone());
        assert_eq!(report.action_ratio, Some(0.2));
        assert!((report.accuracy_delta_deg - 1.0).abs() < 1e-15);
        let back: ComparisonReport = serde_json::from_str(&pretty_json(&report)).unwrap();
        assert_eq!(back, report);

        b.action_count = 0;
        a.action_count = 5;
        assert_eq!(ComparisonReport::new(a, b).action_ratio, None);
    }
}
