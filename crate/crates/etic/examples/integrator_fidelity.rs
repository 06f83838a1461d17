//! Measure the fixed-step integrator on a torque-free tumble.
//!
//! With no torque the rotational kinetic energy and the quaternion norm
//! are exact invariants, and halving the step must shrink the state error
//! about 16x (fourth order). Nothing here uses the controller; this is the
//! propagation core in isolation.

use etic::attitude::{quat_product, InertiaModel, Mat3, Quat, Vec3};
use etic::config::ScenarioConfig;
use etic::plant::rk4;

// q' = q (x) [omega, 0] / 2,  omega' = J^-1 (J omega x omega)
fn tumble_rhs(inertia: &InertiaModel, y: &[f64; 7]) -> [f64; 7] {
    let q = Quat([y[0], y[1], y[2], y[3]]);
    let omega = Vec3([y[4], y[5], y[6]]);
    let q_dot = quat_product(&q, &Quat::from_parts(omega, 0.0));
    let omega_dot = *inertia.j_inv() * (*inertia.j() * omega).cross(omega);
    [
        0.5 * q_dot.0[0],
        0.5 * q_dot.0[1],
        0.5 * q_dot.0[2],
        0.5 * q_dot.0[3],
        omega_dot[0],
        omega_dot[1],
        omega_dot[2],
    ]
}

fn propagate(inertia: &InertiaModel, y0: [f64; 7], dt: f64, t_end: f64) -> [f64; 7] {
    let steps = (t_end / dt).round() as usize;
    let mut y = y0;
    let mut t = 0.0;
    for _ in 0..steps {
        y = rk4(|_, y| tumble_rhs(inertia, y), t, &y, dt);
        t += dt;
    }
    y
}

fn main() -> etic::Result<()> {
    let inertia = InertiaModel::new(Mat3(ScenarioConfig::default().inertia_kg_m2))?;
    let y0 = [0.0, 0.0, 0.0, 1.0, 0.2, -0.1, 0.15];
    let omega0 = Vec3([y0[4], y0[5], y0[6]]);
    let e0 = inertia.kinetic_energy(omega0);

    println!("torque-free tumble, omega(0) = {omega0:?}, E = {e0:.6} J");
    println!();
    println!("{:>8} {:>14} {:>14}", "dt [s]", "energy drift", "|q| - 1");
    for dt in [0.1, 0.05, 0.01] {
        let y = propagate(&inertia, y0, dt, 150.0);
        let e = inertia.kinetic_energy(Vec3([y[4], y[5], y[6]]));
        let qn = Quat([y[0], y[1], y[2], y[3]]).norm();
        println!("{:8.3} {:14.3e} {:14.3e}", dt, (e - e0).abs() / e0, qn - 1.0);
    }

    // order check over 1 s: error(dt) / error(dt/2) against a dt = 1/64 reference
    println!();
    let reference = propagate(&inertia, y0, 1.0 / 64.0, 1.0);
    let err = |dt: f64| -> f64 {
        let y = propagate(&inertia, y0, dt, 1.0);
        y.iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let (e_coarse, e_fine) = (err(0.5), err(0.25));
    println!("state error at dt 0.5: {e_coarse:.3e}, at dt 0.25: {e_fine:.3e}");
    println!("ratio {:.1} (16 = fourth order)", e_coarse / e_fine);
    Ok(())
}
