//! Event-triggered actuation against the always-on periodic baseline.
//!
//! Same plant, same reference, same torque cap. The baseline re-samples a
//! softer proportional-derivative-style torque once per second and never
//! shuts the actuator; the intermittent controller only powers it when the
//! rate error earns it.

use etic::config::ScenarioConfig;
use etic::output::ComparisonReport;
use etic::sim::run_scenario;

fn main() -> etic::Result<()> {
    let config = ScenarioConfig::default();
    let intermittent = run_scenario(&config.build()?)?;
    let periodic = run_scenario(&config.build_periodic_baseline()?)?;
    let report = ComparisonReport::new(intermittent.summary, periodic.summary);

    let i = &report.intermittent;
    let p = &report.periodic;
    println!("{:<28} {:>14} {:>14}", "", "intermittent", "periodic");
    println!("{:<28} {:>14} {:>14}", "actions", i.action_count, p.action_count);
    println!(
        "{:<28} {:>14.4} {:>14.4}",
        "final error [deg]", i.pointing_error_final_deg, p.pointing_error_final_deg,
    );
    println!(
        "{:<28} {:>14.4} {:>14.4}",
        "max error after 100 s [deg]",
        i.pointing_error_max_after_100s_deg,
        p.pointing_error_max_after_100s_deg,
    );
    println!("{:<28} {:>14.1} {:>14.1}", "time powered [s]", i.on_time_total, p.on_time_total);
    println!("{:<28} {:>14.6} {:>14.6}", "max |omega_s| [rad/s]", i.max_omega_s, p.max_omega_s);
    println!();
    if let Some(ratio) = report.action_ratio {
        println!("the triggered controller acts {:.0}% as often as the baseline", ratio * 100.0);
    }
    println!("accuracy delta (intermittent - periodic): {:+.4} deg", report.accuracy_delta_deg);
    Ok(())
}
