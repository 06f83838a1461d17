//! Rigid-body tracking-error dynamics, the moving attitude reference, the
//! bounded periodic disturbance, and a fixed-step RK4 propagator.
//!
//! The state integrated here is the error quaternion `q_e`, the relative
//! body rate `omega_e`, and the reference quaternion `q_d`. The actual
//! body attitude and rate are never stored; they are reconstructed when
//! needed via `omega_s = omega_e + C_e * omega_d` and
//! `q_s = q_d (x) q_e`.

use crate::attitude::{
    kinematics_rhs, rotation_matrix, InertiaModel, Quat, Vec3,
};
use crate::error::{Error, Result};

// ─── Environment models ─────────────────────────────────────────────────

/// Slowly varying bounded disturbance torque, N*m. A fixed three-axis
/// trigonometric profile scaled by `scale`; `omega_dis` sets how fast the
/// phases advance.
#[derive(Debug, Clone, Copy)]
pub struct DisturbanceModel {
    /// Phase rate, rad/s.
    pub omega_dis: f64,
    /// Overall amplitude scale, N*m.
    pub scale: f64,
}

impl DisturbanceModel {
    /// Disturbance torque at time `t`, N*m.
    pub fn torque(&self, t: f64) -> Vec3 {
        let w = self.omega_dis * t;
        Vec3([
            4.0 * (3.0 * w).sin() + 2.0 * (10.0 * w).cos() - 2.0,
            -1.5 * (2.0 * w).sin() + 3.0 * (5.0 * w).cos() + 2.0,
            3.0 * (10.0 * w).sin() - 8.0 * (4.0 * w).cos() + 2.0,
        ]) * self.scale
    }
}

/// Attitude reference: initial quaternion plus a smooth rate profile
/// `omega_d(t) = A [cos(t/p1), sin(t/p2), -cos(t/p3)]` expressed in the
/// reference frame, with `A` in rad/s.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceTrajectory {
    pub q_d0: Quat,
    /// Rate amplitude `A`, rad/s.
    pub amplitude: f64,
    /// Per-axis phase periods, s.
    pub periods: [f64; 3],
}

impl ReferenceTrajectory {
    /// Reference rate at `t`, rad/s (reference-frame coordinates).
    pub fn omega_d(&self, t: f64) -> Vec3 {
        let [p1, p2, p3] = self.periods;
        Vec3([(t / p1).cos(), (t / p2).sin(), -(t / p3).cos()]) * self.amplitude
    }

    /// Analytic time derivative of `omega_d`, rad/s^2.
    pub fn omega_d_dot(&self, t: f64) -> Vec3 {
        let [p1, p2, p3] = self.periods;
        Vec3([
            -(t / p1).sin() / p1,
            (t / p2).cos() / p2,
            (t / p3).sin() / p3,
        ]) * self.amplitude
    }
}

/// Everything `dynamics_rhs` needs besides the state.
#[derive(Debug, Clone, Copy)]
pub struct PlantModel {
    pub inertia: InertiaModel,
    pub reference: ReferenceTrajectory,
    pub disturbance: DisturbanceModel,
}

// ─── State ───────────────────────────────────────────────────────────────

/// Propagated state: error quaternion, relative rate, reference
/// quaternion, and the anti-windup auxiliary state `xi`.
///
/// `xi` rides along for bookkeeping only; the rigid-body step carries it
/// through unchanged (it is driven by the controller between steps).
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyState {
    pub q_e: Quat,
    pub omega_e: Vec3,
    pub q_d: Quat,
    pub xi: Vec3,
}

impl RigidBodyState {
    /// Actual body rate in body coordinates, `omega_e + C_e omega_d`.
    pub fn omega_s(&self, reference: &ReferenceTrajectory, t: f64) -> Vec3 {
        self.omega_e + rotation_matrix(&self.q_e) * reference.omega_d(t)
    }

    /// Actual attitude, `q_d (x) q_e`.
    pub fn q_s(&self) -> Quat {
        crate::attitude::quat_product(&self.q_d, &self.q_e)
    }

    pub fn is_finite(&self) -> bool {
        self.q_e.is_finite()
            && self.omega_e.is_finite()
            && self.q_d.is_finite()
            && self.xi.is_finite()
    }
}

// ─── Dynamics ────────────────────────────────────────────────────────────

/// Torque-like term collecting every rate coupling that is not the applied
/// input: gyroscopic torque plus the reference-motion feedthrough,
/// `J w_e^x C_e w_d - J C_e w_d_dot - w_s^x J w_s`.
///
/// With this grouping the relative-rate dynamics read
/// `J w_e_dot = lumped + u + d`, which is exactly Euler's equations
/// rewritten in relative coordinates.
pub fn lumped_omega_term(
    inertia: &InertiaModel,
    q_e: &Quat,
    omega_e: Vec3,
    omega_d: Vec3,
    omega_d_dot: Vec3,
) -> Vec3 {
    let j = *inertia.j();
    let c_e = rotation_matrix(q_e);
    let omega_s = omega_e + c_e * omega_d;
    j * omega_e.cross(c_e * omega_d) - j * (c_e * omega_d_dot)
        - omega_s.cross(j * omega_s)
}

/// Packed derivative of `(q_e, omega_e, q_d)` under applied torque `u` at
/// time `t`. The disturbance is evaluated here, so RK4 sees it at stage
/// times.
pub fn dynamics_rhs(model: &PlantModel, t: f64, y: &[f64; 11], u: Vec3) -> [f64; 11] {
    let q_e = Quat([y[0], y[1], y[2], y[3]]);
    let omega_e = Vec3([y[4], y[5], y[6]]);
    let q_d = Quat([y[7], y[8], y[9], y[10]]);

    let omega_d = model.reference.omega_d(t);
    let omega_d_dot = model.reference.omega_d_dot(t);
    let d = model.disturbance.torque(t);

    let lumped = lumped_omega_term(&model.inertia, &q_e, omega_e, omega_d, omega_d_dot);
    let omega_e_dot = *model.inertia.j_inv() * (lumped + u + d);

    let q_e_dot = kinematics_rhs(&q_e, omega_e);
    let q_d_dot = kinematics_rhs(&q_d, omega_d);

    [
        q_e_dot.0[0], q_e_dot.0[1], q_e_dot.0[2], q_e_dot.0[3],
        omega_e_dot[0], omega_e_dot[1], omega_e_dot[2],
        q_d_dot.0[0], q_d_dot.0[1], q_d_dot.0[2], q_d_dot.0[3],
    ]
}

/// Classical fourth-order Runge-Kutta step for a fixed-size first-order
/// system.
pub fn rk4<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    dt: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(t + 0.5 * dt, &y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(t + 0.5 * dt, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] = y[i] + dt * k3[i];
    }
    let k4 = f(t + dt, &y4);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One RK4 step of the coupled error/reference dynamics under constant
/// applied torque `u`, with both quaternions renormalized afterwards.
/// `xi` passes through unchanged. Errors if the state stops being finite.
pub fn rk4_step(
    model: &PlantModel,
    t: f64,
    state: &RigidBodyState,
    u: Vec3,
    dt: f64,
) -> Result<RigidBodyState> {
    let y = [
        state.q_e.0[0], state.q_e.0[1], state.q_e.0[2], state.q_e.0[3],
        state.omega_e[0], state.omega_e[1], state.omega_e[2],
        state.q_d.0[0], state.q_d.0[1], state.q_d.0[2], state.q_d.0[3],
    ];
    let y1 = rk4(|tt, yy| dynamics_rhs(model, tt, yy, u), t, &y, dt);
    let next = RigidBodyState {
        q_e: Quat([y1[0], y1[1], y1[2], y1[3]]).renormalize().map_err(|_| {
            Error::Diverged { t: t + dt }
        })?,
        omega_e: Vec3([y1[4], y1[5], y1[6]]),
        q_d: Quat([y1[7], y1[8], y1[9], y1[10]]).renormalize().map_err(|_| {
            Error::Diverged { t: t + dt }
        })?,
        xi: state.xi,
    };
    if !next.is_finite() {
        return Err(Error::Diverged { t: t + dt });
    }
    Ok(next)
}

/// Advance the reference quaternion alone by one RK4 step of
/// `q_d_dot = G(q_d) omega_d(t)`, renormalized.
pub fn propagate_reference(
    reference: &ReferenceTrajectory,
    q_d: &Quat,
    t: f64,
    dt: f64,
) -> Result<Quat> {
    let y = q_d.0;
    let y1 = rk4(
        |tt, yy: &[f64; 4]| kinematics_rhs(&Quat(*yy), reference.omega_d(tt)).0,
        t,
        &y,
        dt,
    );
    Quat(y1).renormalize()
}
