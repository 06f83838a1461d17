//! Scenario configuration document.
//!
//! One JSON object describes a full run: plant, controller gains, trigger
//! thresholds, timing grids. Serialized field names carry explicit units
//! (`M_omega_rad_s`, `U_max_Nm`, ...) because unit slips between deg/s and
//! rad/s are the dominant failure mode for this kind of setup. The two
//! quantities conventionally quoted in degrees (reference-rate amplitude
//! and the slew-rate ceiling) are stored in deg/s and converted exactly
//! once, inside [`ScenarioConfig::build`].
//!
//! The shipped defaults reproduce the bundled benchmark scenario: a rigid
//! spacecraft slewing ~112 deg onto a slowly precessing reference under a
//! 0.05 N*m per-axis torque limit, with the composite trigger running at a
//! 0.1 s judgment period and 1 s actuation grid.

use crate::attitude::{InertiaModel, Mat3, Quat, Vec3};
use crate::controller::{ControllerGains, FeedforwardMode};
use crate::error::{Error, Result};
use crate::plant::{DisturbanceModel, PlantModel, ReferenceTrajectory};
use crate::sim::{ControllerKind, Scenario};
use crate::trigger::{HoldPolicy, TriggerParams};
use serde::{Deserialize, Serialize};

/// Desired angular-velocity profile: per-axis sinusoids
/// `amplitude * [cos(t/p1), sin(t/p2), -cos(t/p3)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    /// Rate amplitude, deg/s.
    pub amplitude_deg_s: f64,
    /// Per-axis phase periods, s.
    pub periods_s: [f64; 3],
}

/// Periodic external disturbance torque model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceConfig {
    /// Base angular frequency of the harmonics, rad/s.
    pub omega_dis_rad_s: f64,
    /// Overall torque scale, N*m.
    #[serde(rename = "scale_Nm")]
    pub scale_nm: f64,
}

/// The complete run description. `Default` is the benchmark scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Inertia matrix rows, kg*m^2. Must be symmetric positive definite.
    pub inertia_kg_m2: [[f64; 3]; 3],
    /// Initial body attitude, scalar-last unit quaternion. Renormalized at
    /// build; entries quoted to a few digits are fine.
    pub q_s0_xyzw: [f64; 4],
    /// Initial desired attitude, scalar-last unit quaternion.
    pub q_d0_xyzw: [f64; 4],
    /// Initial body rate, rad/s.
    pub omega_s0_rad_s: [f64; 3],
    pub reference: ReferenceConfig,
    pub disturbance: DisturbanceConfig,
    pub gains: ControllerGains,
    pub trigger: TriggerParams,
    /// Held-command refresh while ON: latch once at turn-on, or re-sample
    /// at every actuation-grid instant.
    pub hold: HoldPolicy,
    /// Rate-command derivative feed-forward: inertia-weighted or bare.
    pub ff_mode: FeedforwardMode,
    pub controller_kind: ControllerKind,
    /// Baseline re-sampling rate, Hz. Used by the periodic kind and by the
    /// comparison variant.
    pub periodic_rate_hz: f64,
    /// Rate-error feedback for the comparison baseline, which is
    /// conventionally retuned softer than the intermittent gains.
    #[serde(rename = "periodic_K_omega_Nms")]
    pub periodic_k_omega_nms: [f64; 3],
    pub dt_s: f64,
    pub duration_s: f64,
    /// Slew-rate ceiling the run is checked against, deg/s.
    #[serde(rename = "Omega_max_deg_s")]
    pub omega_max_deg_s: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            inertia_kg_m2: [[2.8, 0.002, 0.0076], [0.002, 2.6, 0.01], [0.0076, 0.01, 1.9]],
            q_s0_xyzw: [0.4367, 0.4927, 0.5035, 0.5595],
            q_d0_xyzw: [0.0, 0.0, 0.0, 1.0],
            omega_s0_rad_s: [0.0, 0.0, 0.0],
            reference: ReferenceConfig { amplitude_deg_s: 0.3, periods_s: [80.0, 100.0, 100.0] },
            disturbance: DisturbanceConfig { omega_dis_rad_s: 0.01, scale_nm: 1e-4 },
            gains: ControllerGains {
                m_omega: 0.0175,
                p_b: 0.6,
                k_omega: Vec3([14.0, 13.0, 9.5]),
                d_m: 2e-3,
                mu: Vec3([0.01, 0.01, 0.01]),
                k_u: 0.5,
                k_tau: 1.0,
                p1: 2.0,
                p2: 2.0,
                b1: 1.0,
                b2: 0.002,
                u_max: 0.05,
                eps_xi: 1e-6,
            },
            trigger: TriggerParams {
                a: 0.1,
                b: 1e-4,
                beta: 0.2,
                rho0: 1e-3,
                rho_inf: 1e-5,
                gamma: 0.1,
                t_max_s: 10.0,
                judgment_period_s: 0.1,
                actuation_grid_s: 1.0,
            },
            hold: HoldPolicy::FromTurnOn,
            ff_mode: FeedforwardMode::InertiaWeighted,
            controller_kind: ControllerKind::Intermittent,
            periodic_rate_hz: 1.0,
            periodic_k_omega_nms: [1.5, 1.5, 1.5],
            dt_s: 0.1,
            duration_s: 150.0,
            omega_max_deg_s: 3.0,
        }
    }
}

fn finite_positive(v: f64, field: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn near_unit_quat(q: &[f64; 4], field: &str) -> Result<()> {
    let norm_sq: f64 = q.iter().map(|c| c * c).sum();
    if !norm_sq.is_finite() {
        return Err(Error::invalid(field, "components must be finite"));
    }
    let norm = norm_sq.sqrt();
    // a few quoted digits drift the norm by ~1e-5; a unit-convention slip
    // (e.g. degrees in a component) lands far outside this band
    if (norm - 1.0).abs() > 0.01 {
        return Err(Error::invalid(field, format!("must be near unit norm, got |q| = {norm}")));
    }
    Ok(())
}

/// `value` must sit on the integer multiples of `base`.
fn integer_multiple(value: f64, base: f64) -> bool {
    let ratio = value / base;
    let n = ratio.round();
    n >= 1.0 && (ratio - n).abs() <= 1e-6 * ratio.max(1.0)
}

impl ScenarioConfig {
    /// Field-by-field validation. Errors carry the offending field's path
    /// in the document, e.g. `gains.P_b`.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.inertia_kg_m2.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::invalid(
                        "inertia_kg_m2",
                        format!("entry ({i},{j}) must be finite, got {v}"),
                    ));
                }
            }
        }
        near_unit_quat(&self.q_s0_xyzw, "q_s0_xyzw")?;
        near_unit_quat(&self.q_d0_xyzw, "q_d0_xyzw")?;
        for v in self.omega_s0_rad_s {
            if !v.is_finite() {
                return Err(Error::invalid("omega_s0_rad_s", "components must be finite"));
            }
        }
        if !(self.reference.amplitude_deg_s.is_finite() && self.reference.amplitude_deg_s >= 0.0) {
            return Err(Error::invalid(
                "reference.amplitude_deg_s",
                format!("must be finite and >= 0, got {}", self.reference.amplitude_deg_s),
            ));
        }
        for p in self.reference.periods_s {
            finite_positive(p, "reference.periods_s")?;
        }
        if !(self.disturbance.omega_dis_rad_s.is_finite() && self.disturbance.omega_dis_rad_s >= 0.0)
        {
            return Err(Error::invalid(
                "disturbance.omega_dis_rad_s",
                format!("must be finite and >= 0, got {}", self.disturbance.omega_dis_rad_s),
            ));
        }
        if !(self.disturbance.scale_nm.is_finite() && self.disturbance.scale_nm >= 0.0) {
            return Err(Error::invalid(
                "disturbance.scale_Nm",
                format!("must be finite and >= 0, got {}", self.disturbance.scale_nm),
            ));
        }
        self.gains.validate("gains")?;
        self.trigger.validate("trigger")?;
        finite_positive(self.periodic_rate_hz, "periodic_rate_hz")?;
        for v in self.periodic_k_omega_nms {
            finite_positive(v, "periodic_K_omega_Nms")?;
        }
        finite_positive(self.dt_s, "dt_s")?;
        finite_positive(self.duration_s, "duration_s")?;
        finite_positive(self.omega_max_deg_s, "Omega_max_deg_s")?;
        if !integer_multiple(self.trigger.judgment_period_s, self.dt_s) {
            return Err(Error::invalid(
                "trigger.judgment_period_s",
                format!(
                    "must be an integer multiple of dt_s, got {} vs dt_s = {}",
                    self.trigger.judgment_period_s, self.dt_s
                ),
            ));
        }
        if self.trigger.actuation_grid_s > 0.0
            && !integer_multiple(self.trigger.actuation_grid_s, self.trigger.judgment_period_s)
        {
            return Err(Error::invalid(
                "trigger.actuation_grid_s",
                format!(
                    "must be an integer multiple of judgment_period_s (or 0), got {} vs {}",
                    self.trigger.actuation_grid_s, self.trigger.judgment_period_s
                ),
            ));
        }
        Ok(())
    }

    /// Validate and assemble the runnable scenario. Quaternions are
    /// renormalized; deg/s fields are converted to rad/s here and nowhere
    /// else.
    pub fn build(&self) -> Result<Scenario> {
        self.validate()?;
        let inertia = InertiaModel::new(Mat3(self.inertia_kg_m2))?;
        let q_s0 = Quat(self.q_s0_xyzw).renormalize()?;
        let q_d0 = Quat(self.q_d0_xyzw).renormalize()?;
        Ok(Scenario {
            plant: PlantModel {
                inertia,
                reference: ReferenceTrajectory {
                    q_d0,
                    amplitude: self.reference.amplitude_deg_s.to_radians(),
                    periods: self.reference.periods_s,
                },
                disturbance: DisturbanceModel {
                    omega_dis: self.disturbance.omega_dis_rad_s,
                    scale: self.disturbance.scale_nm,
                },
            },
            gains: self.gains,
            trigger: self.trigger,
            hold: self.hold,
            ff_mode: self.ff_mode,
            kind: self.controller_kind,
            periodic_rate_hz: self.periodic_rate_hz,
            q_s0,
            omega_s0: Vec3(self.omega_s0_rad_s),
            dt: self.dt_s,
            duration_s: self.duration_s,
            omega_max_rad_s: self.omega_max_deg_s.to_radians(),
        })
    }

    /// The comparison baseline: same plant and horizon, always-on periodic
    /// actuation at `periodic_rate_hz` with the softer baseline feedback.
    pub fn build_periodic_baseline(&self) -> Result<Scenario> {
        let mut scenario = self.build()?;
        scenario.kind = ControllerKind::Periodic;
        scenario.gains.k_omega = Vec3(self.periodic_k_omega_nms);
        Ok(scenario)
    }

    /// Parse a JSON document. Unknown or missing fields are errors.
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        serde_json::from_str(text).map_err(Error::from)
    }

    /// Canonical pretty-printed document for this config.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    /// Read and validate a config file.
    pub fn load(path: &std::path::Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        let config = Self::from_json(&text)?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates_and_builds() {
        let config = ScenarioConfig::default();
        config.validate().unwrap();
        let scenario = config.build().unwrap();
        assert_eq!(scenario.gains.m_omega, 0.0175);
        assert_eq!(scenario.trigger.t_max_s, 10.0);
        assert_eq!(scenario.plant.reference.amplitude, 0.3_f64.to_radians());
        assert_eq!(scenario.omega_max_rad_s, 3.0_f64.to_radians());
        assert!((scenario.q_s0.norm() - 1.0).abs() < 1e-15);
        assert_eq!(scenario.kind, ControllerKind::Intermittent);
        assert_eq!(scenario.dt, 0.1);
        assert_eq!(scenario.duration_s, 150.0);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let config = ScenarioConfig::default();
        let parsed = ScenarioConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(parsed, config);
        // and once more through the parsed copy, catching any lossy rename
        assert_eq!(parsed.to_json(), config.to_json());
    }

    #[test]
    fn document_uses_unit_suffixed_names() {
        let text = ScenarioConfig::default().to_json();
        for key in [
            "\"M_omega_rad_s\"",
            "\"U_max_Nm\"",
            "\"K_omega_Nms\"",
            "\"T_max_s\"",
            "\"Omega_max_deg_s\"",
            "\"scale_Nm\"",
            "\"amplitude_deg_s\"",
            "\"periodic_K_omega_Nms\"",
        ] {
            assert!(text.contains(key), "missing {key} in document");
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        let mut value: serde_json::Value =
            serde_json::from_str(&ScenarioConfig::default().to_json()).unwrap();
        value["not_a_field"] = serde_json::json!(1.0);
        let err = ScenarioConfig::from_json(&value.to_string()).unwrap_err();
        assert!(err.to_string().contains("not_a_field"), "got: {err}");
    }

    #[test]
    fn validation_errors_name_the_field_path() {
        let mut config = ScenarioConfig::default();
        config.gains.p_b = -0.2;
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("gains.P_b"), "got: {err}");

        let mut config = ScenarioConfig::default();
        config.trigger.rho0 = 1e-9; // below rho_inf
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("trigger.rho0"), "got: {err}");
    }

    #[test]
    fn grid_divisibility_is_enforced() {
        let mut config = ScenarioConfig::default();
        config.trigger.judgment_period_s = 0.25; // not a multiple of dt = 0.1
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("judgment_period_s"), "got: {err}");

        let mut config = ScenarioConfig::default();
        config.trigger.actuation_grid_s = 0.35; // not a multiple of 0.1
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("actuation_grid_s"), "got: {err}");

        // zero grid means unrestricted openings and is always valid
        let mut config = ScenarioConfig::default();
        config.trigger.actuation_grid_s = 0.0;
        config.validate().unwrap();
    }

    #[test]
    fn quaternion_norm_band() {
        // few-digit rounding stays accepted
        let mut config = ScenarioConfig::default();
        config.q_s0_xyzw = [0.4367, 0.4927, 0.5035, 0.5595];
        config.validate().unwrap();
        // scale blunder rejected, named
        config.q_s0_xyzw = [0.8734, 0.9854, 1.007, 1.119];
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("q_s0_xyzw"), "got: {err}");
    }

    #[test]
    fn periodic_baseline_swaps_kind_and_feedback() {
        let config = ScenarioConfig::default();
        let baseline = config.build_periodic_baseline().unwrap();
        assert_eq!(baseline.kind, ControllerKind::Periodic);
        assert_eq!(baseline.gains.k_omega, Vec3([1.5, 1.5, 1.5]));
        // everything else untouched
        assert_eq!(baseline.gains.m_omega, config.gains.m_omega);
        assert_eq!(baseline.periodic_rate_hz, 1.0);
    }
}
