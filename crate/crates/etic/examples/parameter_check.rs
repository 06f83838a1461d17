//! Evaluate the stability-certificate constants and show how they fail.
//!
//! The certificate needs five positive constants. Each is a gain
//! combination minus a Young-inequality tax, so pushing a single gain far
//! enough always breaks one of them; the sweep below raises the
//! compensation gain K_u until C1 crosses zero.

use etic::analysis::{residual_bounds, stability_constants};
use etic::config::ScenarioConfig;

fn main() -> etic::Result<()> {
    let config = ScenarioConfig::default();
    let scenario = config.build()?;
    let q_e0_min = scenario.initial_state()?.q_e.w().abs();

    let consts =
        stability_constants(&scenario.gains, q_e0_min, &scenario.plant.inertia, &scenario.trigger)?;
    println!("defaults (q_e0_min = {q_e0_min:.4}):");
    println!("  C1 = {:.4}   C2 = {:.4}   C3 = {:.4}", consts.c1, consts.c2, consts.c3);
    println!("  C_t = {:.6}  C_d = {:.6}", consts.c_t, consts.c_d);
    println!("  N_k = {:.6}  N_f = {:.6}  D0 = {:.6}", consts.n_k, consts.n_f, consts.d0);
    let (r_on, r_off, r_final) = residual_bounds(&consts, &scenario.trigger)?;
    println!("  residuals: r_on = {r_on:.4}  r_off = {r_off:.4}  r_final = {r_final:.4}");
    println!("  valid: {}", consts.valid);
    println!();

    // C1 = min_i K_omega_i - (b1 + K_u + 1) / 2 loses positivity at K_u = 17
    println!("K_u sweep:");
    println!("{:>8} {:>10} {:>8}  {}", "K_u", "C1", "valid", "failed conditions");
    for k_u in [0.5, 4.0, 8.0, 12.0, 16.0, 16.9, 17.0, 17.1, 20.0] {
        let mut gains = scenario.gains.clone();
        gains.k_u = k_u;
        let c = stability_constants(&gains, q_e0_min, &scenario.plant.inertia, &scenario.trigger)?;
        println!(
            "{:8.1} {:10.3} {:>8}  {}",
            k_u,
            c.c1,
            c.valid,
            if c.valid { String::from("-") } else { c.failed_conditions().join(", ") },
        );
    }
    Ok(())
}
