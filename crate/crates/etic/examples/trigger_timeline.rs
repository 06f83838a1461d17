//! Walk the event log: when the actuator switched and why.
//!
//! Each powered interval opens on a rate-error crossing and closes either
//! on a staleness crossing (active) or on the dwell cap (passive). The
//! dwell and coast statistics show the cadence the two triggers settle
//! into.

use etic::config::ScenarioConfig;
use etic::sim::run_scenario;
use etic::trigger::EventKind;

fn stats(lengths: &[f64]) -> (f64, f64, f64) {
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lengths.iter().copied().fold(0.0_f64, f64::max);
    let mean = lengths.iter().sum::<f64>() / lengths.len().max(1) as f64;
    (min, mean, max)
}

fn main() -> etic::Result<()> {
    let record = run_scenario(&ScenarioConfig::default().build()?)?;

    println!("first events:");
    println!("{:>8} {:>17} {:>13} {:>13}", "t [s]", "event", "value", "threshold");
    for e in record.events.iter().take(10) {
        let kind = match e.kind {
            EventKind::TurnOn => "TURN_ON",
            EventKind::TurnOffActive => "TURN_OFF_ACTIVE",
            EventKind::TurnOffPassive => "TURN_OFF_PASSIVE",
        };
        println!("{:8.1} {:>17} {:13.4e} {:13.4e}", e.t, kind, e.trigger_value, e.threshold);
    }

    // pair alternating on/off events into dwells and coasts
    let mut dwells = Vec::new();
    let mut coasts = Vec::new();
    let mut last_on: Option<f64> = None;
    let mut last_off = Some(0.0);
    for e in &record.events {
        match e.kind {
            EventKind::TurnOn => {
                if let Some(t_off) = last_off.take() {
                    coasts.push(e.t - t_off);
                }
                last_on = Some(e.t);
            }
            EventKind::TurnOffActive | EventKind::TurnOffPassive => {
                if let Some(t_on) = last_on.take() {
                    dwells.push(e.t - t_on);
                }
                last_off = Some(e.t);
            }
        }
    }

    let (dmin, dmean, dmax) = stats(&dwells);
    let (cmin, cmean, cmax) = stats(&coasts);
    println!();
    println!("{} events over {} powered intervals", record.events.len(), dwells.len());
    println!("dwell  [s]: min {dmin:.1}  mean {dmean:.2}  max {dmax:.1}");
    println!("coast  [s]: min {cmin:.1}  mean {cmean:.2}  max {cmax:.1}");
    let passive = record.summary.trigger_counts.turn_off_passive;
    println!(
        "turn-offs: {} active, {} passive (dwell cap {} s {})",
        record.summary.trigger_counts.turn_off_active,
        passive,
        ScenarioConfig::default().trigger.t_max_s,
        if passive == 0 { "never reached" } else { "reached" },
    );
    Ok(())
}
