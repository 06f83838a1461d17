//! Composite turn-on/turn-off trigger automaton.
//!
//! The actuator is opened when the rate-tracking error `|z2|^2` escapes a
//! decaying envelope and closed when either the held-command staleness
//! `|e_tau|^2` escapes its own envelope (active) or the maximum dwell time
//! elapses (passive). Decisions happen only at judgment-grid instants;
//! opening is further quantized to the actuation grid. Both envelopes use
//! absolute time in their exponentials.

use crate::attitude::Vec3;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Trigger thresholds and timing grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerParams {
    /// Turn-off envelope scale, (N*m)^2.
    pub a: f64,
    /// Turn-off envelope floor, (N*m)^2.
    pub b: f64,
    /// Turn-off envelope decay rate, 1/s.
    pub beta: f64,
    /// Turn-on envelope initial level, (rad/s)^2.
    pub rho0: f64,
    /// Turn-on envelope floor, (rad/s)^2.
    pub rho_inf: f64,
    /// Turn-on envelope decay rate, 1/s.
    pub gamma: f64,
    /// Maximum continuous actuator-on dwell, s.
    #[serde(rename = "T_max_s")]
    pub t_max_s: f64,
    /// Spacing of trigger-evaluation instants, s.
    pub judgment_period_s: f64,
    /// Actuator opening quantization, s. Zero means openings are
    /// unrestricted (any judgment instant).
    pub actuation_grid_s: f64,
}

impl TriggerParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let path = |f: &str| if prefix.is_empty() { f.to_string() } else { format!("{prefix}.{f}") };
        let positive = |v: f64, f: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(path(f), format!("must be finite and > 0, got {v}")))
            }
        };
        positive(self.a, "a")?;
        positive(self.b, "b")?;
        positive(self.beta, "beta")?;
        positive(self.rho0, "rho0")?;
        positive(self.rho_inf, "rho_inf")?;
        positive(self.gamma, "gamma")?;
        positive(self.t_max_s, "T_max_s")?;
        positive(self.judgment_period_s, "judgment_period_s")?;
        if !(self.actuation_grid_s.is_finite() && self.actuation_grid_s >= 0.0) {
            return Err(Error::invalid(
                path("actuation_grid_s"),
                format!("must be finite and >= 0, got {}", self.actuation_grid_s),
            ));
        }
        if self.rho0 <= self.rho_inf {
            return Err(Error::invalid(
                path("rho0"),
                format!("must exceed rho_inf, got rho0 = {} <= rho_inf = {}", self.rho0, self.rho_inf),
            ));
        }
        Ok(())
    }
}

/// Turn-off envelope `a e^(-beta t) + b` at absolute time `t`.
pub fn turn_off_threshold(t: f64, params: &TriggerParams) -> f64 {
    params.a * (-params.beta * t).exp() + params.b
}

/// Turn-on envelope `(rho0 - rho_inf) e^(-gamma t) + rho_inf` at absolute
/// time `t`.
pub fn turn_on_threshold(t: f64, params: &TriggerParams) -> f64 {
    (params.rho0 - params.rho_inf) * (-params.gamma * t).exp() + params.rho_inf
}

/// Why an ON interval ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnOffCause {
    /// Staleness escaped its envelope.
    Active,
    /// Dwell reached the maximum. An active cause at the same instant wins.
    Passive,
}

/// Turn-off decision while ON. `Active` wins when both conditions hold.
pub fn turn_off_due(t: f64, t_on_k: f64, e_tau_sq: f64, params: &TriggerParams) -> Option<TurnOffCause> {
    if e_tau_sq > turn_off_threshold(t, params) {
        Some(TurnOffCause::Active)
    } else if t - t_on_k >= params.t_max_s - 1e-9 * params.t_max_s.max(1.0) {
        Some(TurnOffCause::Passive)
    } else {
        None
    }
}

/// Turn-on decision while OFF.
pub fn turn_on_due(t: f64, z2_sq: f64, params: &TriggerParams) -> bool {
    z2_sq > turn_on_threshold(t, params)
}

/// Actuator state. `PendingOn` is internal: the turn-on condition has
/// fired but the next actuation-grid instant has not yet arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriggerMode {
    #[serde(rename = "OFF")]
    Off,
    #[serde(rename = "PENDING_ON")]
    PendingOn,
    #[serde(rename = "ON")]
    On,
}

/// What the turn-on torque sample does while the actuator stays open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoldPolicy {
    /// Latch the command once at turn-on; staleness grows until turn-off.
    FromTurnOn,
    /// Re-sample at every actuation-grid instant while ON.
    PerControlPeriod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "TURN_ON")]
    TurnOn,
    #[serde(rename = "TURN_OFF_ACTIVE")]
    TurnOffActive,
    #[serde(rename = "TURN_OFF_PASSIVE")]
    TurnOffPassive,
}

/// One logged actuation event. For turn-ons the value/threshold pair is
/// the rate-error square against its envelope, both sampled at the opening
/// instant; for active turn-offs the staleness against its envelope; for
/// passive turn-offs the elapsed dwell against the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    pub trigger_value: f64,
    pub threshold: f64,
}

/// True when `t` sits on the grid `k * period` within a relative snap
/// tolerance. A non-positive period means every instant qualifies.
pub fn on_grid(t: f64, period: f64) -> bool {
    if period <= 0.0 {
        return true;
    }
    let k = (t / period).round();
    (t - k * period).abs() < 1e-9 * period.max(1.0)
}

/// The trigger automaton. Advance it with [`TriggerMachine::step`] exactly
/// once per judgment instant, in time order.
#[derive(Debug, Clone)]
pub struct TriggerMachine {
    params: TriggerParams,
    hold: HoldPolicy,
    mode: TriggerMode,
    t_on_k: f64,
    t_off_k: f64,
    held: Vec3,
    last_t: Option<f64>,
    events: Vec<EventRecord>,
}

impl TriggerMachine {
    /// Fresh machine in OFF mode; the first logged event is always TURN_ON.
    pub fn new(params: TriggerParams, hold: HoldPolicy) -> TriggerMachine {
        TriggerMachine {
            params,
            hold,
            mode: TriggerMode::Off,
            t_on_k: f64::NAN,
            t_off_k: 0.0,
            held: Vec3::ZERO,
            last_t: None,
            events: Vec::new(),
        }
    }

    pub fn mode(&self) -> TriggerMode {
        self.mode
    }

    /// Held command; zero whenever the actuator is not open.
    pub fn held_command(&self) -> Vec3 {
        self.held
    }

    pub fn t_on_k(&self) -> f64 {
        self.t_on_k
    }

    pub fn t_off_k(&self) -> f64 {
        self.t_off_k
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn into_events(self) -> Vec<EventRecord> {
        self.events
    }

    fn open(&mut self, t: f64, z2_sq: f64, tau_current: Vec3) {
        self.mode = TriggerMode::On;
        self.t_on_k = t;
        self.held = tau_current;
        self.events.push(EventRecord {
            t,
            kind: EventKind::TurnOn,
            trigger_value: z2_sq,
            threshold: turn_on_threshold(t, &self.params),
        });
    }

    /// Advance one judgment instant. `e_tau_sq` must be computed by the
    /// caller against the held command from the previous instant;
    /// `tau_current` is the command that would be latched if the actuator
    /// opens (or re-samples) now. Returns whether the actuator is enabled
    /// after the update. At most one mode transition happens per instant,
    /// decided by the entry mode: an instant that closes the actuator never
    /// re-opens it, and the turn-off check precedes any re-sampling so a
    /// staleness escape cannot be masked by a fresh sample at the same
    /// instant.
    pub fn step(&mut self, t: f64, e_tau_sq: f64, z2_sq: f64, tau_current: Vec3) -> Result<bool> {
        if let Some(prev) = self.last_t {
            if t <= prev {
                return Err(Error::Timeline {
                    why: format!("trigger stepped backwards: t = {t} after {prev}"),
                });
            }
        }
        self.last_t = Some(t);
        match self.mode {
            TriggerMode::On => {
                if let Some(cause) = turn_off_due(t, self.t_on_k, e_tau_sq, &self.params) {
                    self.mode = TriggerMode::Off;
                    self.t_off_k = t;
                    self.held = Vec3::ZERO;
                    let (kind, value, threshold) = match cause {
                        TurnOffCause::Active => (
                            EventKind::TurnOffActive,
                            e_tau_sq,
                            turn_off_threshold(t, &self.params),
                        ),
                        TurnOffCause::Passive => {
                            (EventKind::TurnOffPassive, t - self.t_on_k, self.params.t_max_s)
                        }
                    };
                    self.events.push(EventRecord { t, kind, trigger_value: value, threshold });
                } else if self.hold == HoldPolicy::PerControlPeriod
                    && on_grid(t, self.params.actuation_grid_s)
                {
                    self.held = tau_current;
                }
            }
            TriggerMode::Off => {
                if turn_on_due(t, z2_sq, &self.params) {
                    if on_grid(t, self.params.actuation_grid_s) {
                        self.open(t, z2_sq, tau_current);
                    } else {
                        self.mode = TriggerMode::PendingOn;
                    }
                }
            }
            TriggerMode::PendingOn => {
                // promotion is unconditional: the commitment was made when
                // the condition fired, the grid only delays the opening
                if on_grid(t, self.params.actuation_grid_s) {
                    self.open(t, z2_sq, tau_current);
                }
            }
        }
        Ok(self.mode == TriggerMode::On)
    }
}
