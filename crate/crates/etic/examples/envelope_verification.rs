//! Audit a run against its Lyapunov decay envelopes.
//!
//! Reruns the default scenario with the actuation grid collapsed onto the
//! judgment grid (the certificate's sampling assumption), rebuilds every
//! per-interval exponential bound, extends each over the whole run, and
//! checks the total energy never crosses their pointwise maximum. Also
//! checks the coast-phase rate-energy bound `V2 <= J2` outside trigger
//! reaction windows.

use etic::analysis::{
    envelope_check, j2_exceedance_check, residual_bounds, stability_constants, SegmentKind,
};
use etic::config::ScenarioConfig;
use etic::sim::{lyapunov_series, run_scenario, z2_sq_series};

fn main() -> etic::Result<()> {
    let mut config = ScenarioConfig::default();
    config.trigger.actuation_grid_s = 0.0;
    let scenario = config.build()?;
    let record = run_scenario(&scenario)?;

    let q_e0_min = record.telemetry[0].q_e0.abs().clamp(f64::MIN_POSITIVE, 1.0);
    let consts =
        stability_constants(&scenario.gains, q_e0_min, &scenario.plant.inertia, &scenario.trigger)?;
    let (r_on, r_off, r_final) = residual_bounds(&consts, &scenario.trigger)?;
    let samples = lyapunov_series(&record.telemetry);
    let envelope = envelope_check(&samples, &record.events, &consts, &scenario.trigger)?;
    let j2 = j2_exceedance_check(&samples, &z2_sq_series(&record.telemetry), &record.events, &scenario.trigger)?;

    let count = |kind: SegmentKind| envelope.segments.iter().filter(|s| s.kind == kind).count();
    println!(
        "segments: {} ({} ON fast, {} ON slow, {} OFF fast, {} OFF slow)",
        envelope.segments.len(),
        count(SegmentKind::OnFast),
        count(SegmentKind::OnSlow),
        count(SegmentKind::OffFast),
        count(SegmentKind::OffSlow),
    );
    println!("longest coast used for inflation: {:.1} s", envelope.t_maxoff);
    println!();
    println!("first segments (anchor time, kind, anchor value):");
    for seg in envelope.segments.iter().take(6) {
        println!("  t = {:6.1}  {:?}  V = {:.6e}", seg.t_trig, seg.kind, seg.initial_value);
    }
    println!();
    println!("energy envelope violations: {}", envelope.violations.len());
    println!("minimum margin bound - V:   {:.6e}", envelope.min_margin);
    println!("coast-bound violations:     {}", j2.violations.len());
    println!("permitted reaction samples: {}", j2.permitted_exceedances);
    println!();
    println!("residual levels: r_on = {r_on:.4}, r_off = {r_off:.4}, r_final = {r_final:.4}");
    let v_final = samples.last().map(|s| s.v).unwrap_or(0.0);
    println!("final energy V = {v_final:.6e} ({})", if v_final <= r_final { "inside r_final" } else { "above r_final" });
    Ok(())
}
