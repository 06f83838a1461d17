//! Scenario wiring and the main simulation loop.
//!
//! Signal route per step: the backstepping law produces an unconstrained
//! command `tau`; the trigger latches it into the held command `tau_e`
//! (zero while the actuator is closed); the limiter clips `tau_e` to the
//! applied torque `u`; the clipping deficit `delta_tau = tau_e - u` drives
//! the auxiliary anti-windup state. Controller quantities refresh at the
//! judgment rate; the applied torque is held between judgment instants, so
//! refining `dt` below the judgment period changes only integration error.

use crate::analysis::{
    envelope_check, judgment_j2, lyapunov_values, stability_constants, LyapunovSample,
};
use crate::attitude::{quat_error, rotation_matrix, Quat, Vec3};
use crate::controller::{
    saturate, torque_command, virtual_rate, BackwardDiff, ControllerGains, FeedforwardMode,
};
use crate::error::{Error, Result};
use crate::plant::{lumped_omega_term, rk4_step, PlantModel, RigidBodyState};
use crate::trigger::{
    on_grid, EventKind, EventRecord, HoldPolicy, TriggerMachine, TriggerMode, TriggerParams,
};
use serde::{Deserialize, Serialize};

/// Which actuation discipline drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    /// Event-triggered intermittent actuation.
    Intermittent,
    /// Always-on actuation re-sampled at a fixed rate; the comparison
    /// baseline.
    Periodic,
}

/// A fully validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub plant: PlantModel,
    pub gains: ControllerGains,
    pub trigger: TriggerParams,
    pub hold: HoldPolicy,
    pub ff_mode: FeedforwardMode,
    pub kind: ControllerKind,
    /// Baseline re-sampling rate, Hz. Used only by the periodic kind.
    pub periodic_rate_hz: f64,
    pub q_s0: Quat,
    pub omega_s0: Vec3,
    pub dt: f64,
    pub duration_s: f64,
    /// Scenario-level slew-rate ceiling used by acceptance checks, rad/s.
    pub omega_max_rad_s: f64,
}

impl Scenario {
    /// Initial error-space state: `q_e(0)` from the desired and actual
    /// attitudes, `omega_e(0) = omega_s(0) - C_e omega_d(0)`.
    pub fn initial_state(&self) -> Result<RigidBodyState> {
        let q_d0 = self.plant.reference.q_d0;
        let q_e = quat_error(&q_d0, &self.q_s0).renormalize()?;
        let omega_d0 = self.plant.reference.omega_d(0.0);
        let omega_e = self.omega_s0 - rotation_matrix(&q_e) * omega_d0;
        Ok(RigidBodyState { q_e, omega_e, q_d: q_d0, xi: Vec3::ZERO })
    }

    /// Judgment instants must land exactly on integration steps.
    pub fn steps_per_judgment(&self) -> Result<usize> {
        let ratio = self.trigger.judgment_period_s / self.dt;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 {
            return Err(Error::invalid(
                "dt",
                format!(
                    "must divide the judgment period: dt = {}, judgment = {}",
                    self.dt, self.trigger.judgment_period_s
                ),
            ));
        }
        Ok(n as usize)
    }
}

/// One recorded instant. The controller columns (`omega_v` through `u`)
/// hold their last judgment-instant values on sub-judgment rows; `z2`, the
/// Lyapunov values and the staleness are recomputed against the current
/// state so the energy bookkeeping stays honest at any `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub t: f64,
    pub q_ev: Vec3,
    pub q_e0: f64,
    pub omega_s: Vec3,
    pub omega_e: Vec3,
    pub omega_v: Vec3,
    pub z2: Vec3,
    pub tau: Vec3,
    pub tau_e: Vec3,
    pub u: Vec3,
    /// Squared distance between the command and the held command,
    /// `|tau - tau_e|^2`, after any trigger update at this instant.
    pub e_tau_sq: f64,
    pub xi: Vec3,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub j2: f64,
    /// Actuator state after any update at this instant. The internal
    /// pending state reports as OFF because the actuator is still shut.
    pub mode: TriggerMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerCounts {
    pub turn_on: usize,
    pub turn_off_active: usize,
    pub turn_off_passive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    /// Actuation-grid ticks spent in ON mode (intermittent) or baseline
    /// ticks with a nonzero held command (periodic).
    pub action_count: u64,
    pub pointing_error_final_deg: f64,
    pub pointing_error_max_after_100s_deg: f64,
    pub max_omega_s: f64,
    pub on_time_total: f64,
    pub trigger_counts: TriggerCounts,
    /// Samples at or above the certificate envelope; absent when the
    /// certificate conditions do not hold for the scenario's gains.
    pub envelope_violations: Option<usize>,
}

/// A completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub telemetry: Vec<TelemetrySample>,
    pub events: Vec<EventRecord>,
    pub summary: SummaryMetrics,
}

/// Attitude error angle in degrees: `2 arccos(min(1, |q_e0|))`.
pub fn pointing_error_deg(q_e0: f64) -> f64 {
    2.0 * q_e0.abs().min(1.0).acos().to_degrees()
}

// state carried by the controller between judgment instants
struct HeldSignals {
    omega_v: Vec3,
    tau: Vec3,
    tau_e: Vec3,
    u: Vec3,
    delta_tau: Vec3,
    mode: TriggerMode,
}

fn guard_finite(state: &RigidBodyState, t: f64) -> Result<()> {
    if !state.is_finite() || state.omega_e.max_abs() > 1e6 {
        return Err(Error::Diverged { t });
    }
    Ok(())
}

/// Run a scenario to completion. Deterministic: the loop is pure f64
/// arithmetic with no iteration-order or randomness dependence, so equal
/// configs give bit-identical telemetry.
pub fn run_scenario(scenario: &Scenario) -> Result<RunRecord> {
    let sub = scenario.steps_per_judgment()?;
    let steps = (scenario.duration_s / scenario.dt).round() as usize;
    let inertia = &scenario.plant.inertia;
    let lambda_max = inertia.lambda_max();
    let periodic_period = if scenario.kind == ControllerKind::Periodic {
        if !(scenario.periodic_rate_hz.is_finite() && scenario.periodic_rate_hz > 0.0) {
            return Err(Error::invalid(
                "periodic_rate_hz",
                format!("must be finite and > 0, got {}", scenario.periodic_rate_hz),
            ));
        }
        1.0 / scenario.periodic_rate_hz
    } else {
        0.0
    };

    let mut state = scenario.initial_state()?;
    let mut machine = TriggerMachine::new(scenario.trigger, scenario.hold);
    let mut wdot_diff = BackwardDiff::default();
    let mut periodic_held = Vec3::ZERO;
    let mut held = HeldSignals {
        omega_v: Vec3::ZERO,
        tau: Vec3::ZERO,
        tau_e: Vec3::ZERO,
        u: Vec3::ZERO,
        delta_tau: Vec3::ZERO,
        mode: TriggerMode::Off,
    };
    let mut telemetry = Vec::with_capacity(steps);

    for i in 0..steps {
        let t = i as f64 * scenario.dt;
        guard_finite(&state, t)?;

        if i % sub == 0 {
            // judgment instant: full controller evaluation
            let omega_d = scenario.plant.reference.omega_d(t);
            let omega_d_dot = scenario.plant.reference.omega_d_dot(t);
            let omega_v = virtual_rate(&state.q_e, &scenario.gains)?;
            let omega_v_dot = wdot_diff.update(omega_v, scenario.trigger.judgment_period_s);
            let z2 = state.omega_e - omega_v;
            let lumped = lumped_omega_term(inertia, &state.q_e, state.omega_e, omega_d, omega_d_dot);
            let tau = torque_command(
                &state.q_e,
                z2,
                lumped,
                omega_v_dot,
                state.xi,
                &scenario.gains,
                inertia,
                scenario.ff_mode,
            );

            let (tau_e, mode) = match scenario.kind {
                ControllerKind::Intermittent => {
                    // staleness against the command held since the previous
                    // instant decides the turn-off
                    let e_tau_sq = (tau - machine.held_command()).norm_sq();
                    machine.step(t, e_tau_sq, z2.norm_sq(), tau)?;
                    (machine.held_command(), machine.mode())
                }
                ControllerKind::Periodic => {
                    if on_grid(t, periodic_period) {
                        periodic_held = tau;
                    }
                    (periodic_held, TriggerMode::On)
                }
            };
            let u = saturate(tau_e, scenario.gains.u_max);
            held = HeldSignals {
                omega_v,
                tau,
                tau_e,
                u,
                delta_tau: tau_e - u,
                mode: if mode == TriggerMode::On { TriggerMode::On } else { TriggerMode::Off },
            };
        }

        // rate error against the currently commanded virtual rate
        let z2 = state.omega_e - held.omega_v;
        let (v1, v2, v3, _) = lyapunov_values(state.q_e.vec(), z2, state.xi, inertia);
        telemetry.push(TelemetrySample {
            t,
            q_ev: state.q_e.vec(),
            q_e0: state.q_e.w(),
            omega_s: state.omega_s(&scenario.plant.reference, t),
            omega_e: state.omega_e,
            omega_v: held.omega_v,
            z2,
            tau: held.tau,
            tau_e: held.tau_e,
            u: held.u,
            e_tau_sq: (held.tau - held.tau_e).norm_sq(),
            xi: state.xi,
            v1,
            v2,
            v3,
            j2: judgment_j2(t, lambda_max, &scenario.trigger),
            mode: held.mode,
        });

        state = rk4_step(&scenario.plant, t, &state, held.u, scenario.dt)?;
        state.xi = crate::controller::aux_step(state.xi, held.delta_tau, scenario.dt, &scenario.gains);
    }

    let events = machine.into_events();
    let summary = summarize_metrics(&telemetry, &events, scenario);
    Ok(RunRecord { telemetry, events, summary })
}

/// Convenience wrapper asserting the periodic kind, mirroring the two
/// disciplines as separate entry points.
pub fn run_periodic_baseline(scenario: &Scenario) -> Result<RunRecord> {
    if scenario.kind != ControllerKind::Periodic {
        return Err(Error::invalid("controller_kind", "run_periodic_baseline needs the periodic kind"));
    }
    run_scenario(scenario)
}

/// Derive the run's summary. Works from recorded rows only, so it can be
/// recomputed from persisted telemetry.
pub fn summarize_metrics(
    telemetry: &[TelemetrySample],
    events: &[EventRecord],
    scenario: &Scenario,
) -> SummaryMetrics {
    let final_err = telemetry.last().map(|s| pointing_error_deg(s.q_e0)).unwrap_or(0.0);
    let mut max_after_100 = f64::NEG_INFINITY;
    let mut max_omega_s: f64 = 0.0;
    let mut on_rows = 0usize;
    for s in telemetry {
        if s.t >= 100.0 - 1e-9 {
            max_after_100 = max_after_100.max(pointing_error_deg(s.q_e0));
        }
        max_omega_s = max_omega_s.max(s.omega_s.norm());
        if s.mode == TriggerMode::On {
            on_rows += 1;
        }
    }
    if max_after_100 == f64::NEG_INFINITY {
        max_after_100 = final_err;
    }

    let action_count = match scenario.kind {
        ControllerKind::Intermittent => {
            // a non-positive grid degenerates to the judgment grid
            let grid = if scenario.trigger.actuation_grid_s > 0.0 {
                scenario.trigger.actuation_grid_s
            } else {
                scenario.trigger.judgment_period_s
            };
            telemetry
                .iter()
                .filter(|s| s.mode == TriggerMode::On && on_grid(s.t, grid))
                .count() as u64
        }
        ControllerKind::Periodic => {
            let period = 1.0 / scenario.periodic_rate_hz;
            telemetry
                .iter()
                .filter(|s| on_grid(s.t, period) && s.tau_e != Vec3::ZERO)
                .count() as u64
        }
    };

    let mut counts = TriggerCounts { turn_on: 0, turn_off_active: 0, turn_off_passive: 0 };
    for e in events {
        match e.kind {
            EventKind::TurnOn => counts.turn_on += 1,
            EventKind::TurnOffActive => counts.turn_off_active += 1,
            EventKind::TurnOffPassive => counts.turn_off_passive += 1,
        }
    }

    let envelope_violations = match scenario.kind {
        ControllerKind::Periodic => None,
        ControllerKind::Intermittent => telemetry.first().and_then(|s0| {
            let q_e0_min = s0.q_e0.abs().clamp(f64::MIN_POSITIVE, 1.0);
            let consts =
                stability_constants(&scenario.gains, q_e0_min, &scenario.plant.inertia, &scenario.trigger)
                    .ok()?;
            if !consts.valid {
                return None;
            }
            let samples = lyapunov_series(telemetry);
            envelope_check(&samples, events, &consts, &scenario.trigger)
                .ok()
                .map(|r| r.violations.len())
        }),
    };

    SummaryMetrics {
        action_count,
        pointing_error_final_deg: final_err,
        pointing_error_max_after_100s_deg: max_after_100,
        max_omega_s,
        on_time_total: on_rows as f64 * scenario.dt,
        trigger_counts: counts,
        envelope_violations,
    }
}

/// Project telemetry onto the energy bookkeeping view.
pub fn lyapunov_series(telemetry: &[TelemetrySample]) -> Vec<LyapunovSample> {
    telemetry
        .iter()
        .map(|s| LyapunovSample {
            t: s.t,
            v1: s.v1,
            v2: s.v2,
            v3: s.v3,
            v: s.v1 + s.v2 + s.v3,
            j2: s.j2,
            mode: s.mode,
        })
        .collect()
}

/// Squared rate-error series matching [`lyapunov_series`] row for row.
pub fn z2_sq_series(telemetry: &[TelemetrySample]) -> Vec<f64> {
    telemetry.iter().map(|s| s.z2.norm_sq()).collect()
}
