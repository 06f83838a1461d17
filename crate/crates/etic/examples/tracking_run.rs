//! Run the flagship tracking scenario and print what happened.
//!
//! The default config: a small rigid body starts 112 deg away from a
//! slowly precessing reference with the actuator shut, torque capped at
//! 0.05 N m and the slew rate at 3 deg/s. The event triggers decide when
//! the actuator is worth powering.

use etic::config::ScenarioConfig;
use etic::sim::{pointing_error_deg, run_scenario};
use etic::trigger::TriggerMode;

fn main() -> etic::Result<()> {
    let config = ScenarioConfig::default();
    let scenario = config.build()?;
    let record = run_scenario(&scenario)?;

    println!("pointing error profile (one row per 10 s):");
    println!("{:>7} {:>10} {:>12} {:>12} {:>5}", "t [s]", "err [deg]", "|z2|^2", "|e_tau|^2", "mode");
    for row in record.telemetry.iter().step_by(100) {
        println!(
            "{:7.1} {:10.4} {:12.3e} {:12.3e} {:>5}",
            row.t,
            pointing_error_deg(row.q_e0),
            row.z2.norm_sq(),
            row.e_tau_sq,
            if row.mode == TriggerMode::On { "ON" } else { "OFF" },
        );
    }

    let max_u = record
        .telemetry
        .iter()
        .map(|s| s.u.max_abs())
        .fold(0.0_f64, f64::max);
    let s = &record.summary;
    println!();
    println!("actions on the 1 s grid:  {}", s.action_count);
    println!(
        "trigger events:           {} on / {} off active / {} off passive",
        s.trigger_counts.turn_on, s.trigger_counts.turn_off_active, s.trigger_counts.turn_off_passive,
    );
    println!("time powered:             {:.1} s of {:.0} s", s.on_time_total, scenario.duration_s);
    println!("final pointing error:     {:.4} deg", s.pointing_error_final_deg);
    println!("max error after 100 s:    {:.4} deg", s.pointing_error_max_after_100s_deg);
    println!(
        "max |omega_s|:            {:.6} rad/s (ceiling {:.6})",
        s.max_omega_s, scenario.omega_max_rad_s,
    );
    println!("max |u_i|:                {:.6} N m (ceiling {:.6})", max_u, scenario.gains.u_max);
    if let Some(v) = s.envelope_violations {
        println!("energy envelope:          {v} violation(s)");
    }
    Ok(())
}
