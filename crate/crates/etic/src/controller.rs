//! Constrained backstepping attitude controller.
//!
//! The cascade: a saturating shaping curve (`psat`) turns the attitude
//! error into a virtual rate command `omega_v` whose norm never exceeds
//! `M_omega`; the torque law drives the rate error `z2 = omega_e - omega_v`
//! to zero while compensating the bounded disturbance with a `tanh`
//! estimator; an auxiliary first-order system `xi` absorbs whatever the
//! torque limiter refuses to pass through.

use crate::attitude::{gamma_inverse, InertiaModel, Quat, Vec3};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Controller gain set. All angular quantities rad or rad/s, torques N*m.
/// The serialized field names carry explicit units so a config document
/// cannot silently mix deg/s and rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerGains {
    /// Virtual-rate norm ceiling, rad/s.
    #[serde(rename = "M_omega_rad_s")]
    pub m_omega: f64,
    /// Shaping-curve knee, dimensionless, in (0, 1).
    #[serde(rename = "P_b")]
    pub p_b: f64,
    /// Rate-error feedback, diagonal, N*m*s.
    #[serde(rename = "K_omega_Nms")]
    pub k_omega: Vec3,
    /// Disturbance-compensator magnitude, N*m. Must dominate the true
    /// disturbance norm for the estimator to help.
    #[serde(rename = "D_m_Nm")]
    pub d_m: f64,
    /// Compensator sharpness per axis, rad/s.
    #[serde(rename = "mu_rad_s")]
    pub mu: Vec3,
    /// Anti-windup injection gain into the torque law.
    #[serde(rename = "K_u")]
    pub k_u: f64,
    /// Anti-windup input gain.
    #[serde(rename = "K_tau")]
    pub k_tau: f64,
    /// Auxiliary-state linear decay rate, 1/s.
    pub p1: f64,
    /// Auxiliary-state deficit-quenching weight.
    pub p2: f64,
    /// Certificate weight pairing the attitude level with the actuator
    /// deficit.
    pub b1: f64,
    /// Certificate weight pairing the coast-phase decay with the rate error.
    pub b2: f64,
    /// Per-axis torque limit, N*m.
    #[serde(rename = "U_max_Nm")]
    pub u_max: f64,
    /// Auxiliary-state singularity guard: `|xi|^2` is floored at
    /// `eps_xi^2` inside the quenching term.
    pub eps_xi: f64,
}

impl ControllerGains {
    /// Field-by-field positivity and range checks. `prefix` is prepended
    /// to the offending field name in errors (config uses `gains`).
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let path = |f: &str| if prefix.is_empty() { f.to_string() } else { format!("{prefix}.{f}") };
        let positive = |v: f64, f: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(path(f), format!("must be finite and > 0, got {v}")))
            }
        };
        let non_negative = |v: f64, f: &str| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(path(f), format!("must be finite and >= 0, got {v}")))
            }
        };
        positive(self.m_omega, "M_omega_rad_s")?;
        if !(self.p_b.is_finite() && self.p_b > 0.0 && self.p_b < 1.0) {
            return Err(Error::invalid(path("P_b"), format!("must lie in (0, 1), got {}", self.p_b)));
        }
        for i in 0..3 {
            positive(self.k_omega[i], "K_omega_Nms")?;
            positive(self.mu[i], "mu_rad_s")?;
        }
        non_negative(self.d_m, "D_m_Nm")?;
        non_negative(self.k_u, "K_u")?;
        non_negative(self.k_tau, "K_tau")?;
        positive(self.p1, "p1")?;
        non_negative(self.p2, "p2")?;
        positive(self.b1, "b1")?;
        positive(self.b2, "b2")?;
        positive(self.u_max, "U_max_Nm")?;
        positive(self.eps_xi, "eps_xi")?;
        Ok(())
    }

    pub fn k_omega_min(&self) -> f64 {
        self.k_omega[0].min(self.k_omega[1]).min(self.k_omega[2])
    }
}

// ─── Saturating shaping curve ────────────────────────────────────────────

/// Coefficients of the piecewise shaping curve on [-1, 1]:
/// quadratic `-a_p (x+1)^2 - 1` on `[-1, -P_b]`, linear `K_m x` in the
/// middle, quadratic `a_p (x-1)^2 + 1` on `[P_b, 1]`.
///
/// `a_p = 1 / (P_b^2 - 1)` (negative) and `K_m = 2 / (P_b + 1)` are the
/// unique pair making the curve continuous with a continuous first
/// derivative at the knees. The resulting curve is odd, bounded by 1, and
/// dominates the identity: `|psat(x)| >= |x|`.
#[derive(Debug, Clone, Copy)]
pub struct PsatCoefficients {
    pub p_b: f64,
    pub a_p: f64,
    pub k_m: f64,
}

impl PsatCoefficients {
    pub fn new(p_b: f64) -> Result<PsatCoefficients> {
        if !(p_b.is_finite() && p_b > 0.0 && p_b < 1.0) {
            return Err(Error::invalid("P_b", format!("must lie in (0, 1), got {p_b}")));
        }
        Ok(PsatCoefficients {
            p_b,
            a_p: 1.0 / (p_b * p_b - 1.0),
            k_m: 2.0 / (p_b + 1.0),
        })
    }

    /// Alternative mid-segment slope `-a_p (P_b - 1)^2 / P_b` that is
    /// sometimes quoted for this curve family. It does NOT meet the outer
    /// quadratics (the curve jumps at `|x| = P_b`), so it is not used by
    /// the controller; it is kept public so the defect can be measured
    /// side by side with the consistent slope.
    pub fn k_m_noncontinuous_variant(&self) -> f64 {
        -self.a_p * (self.p_b - 1.0) * (self.p_b - 1.0) / self.p_b
    }
}

/// Scalar shaping curve. Inputs outside [-1, 1] cannot occur for unit
/// quaternion components; they are clamped with a warning on stderr.
pub fn psat_scalar(x: f64, c: &PsatCoefficients) -> f64 {
    let x = if x.abs() > 1.0 {
        eprintln!("warning: psat input {x} outside [-1, 1], clamped");
        x.clamp(-1.0, 1.0)
    } else {
        x
    };
    if x > c.p_b {
        c.a_p * (x - 1.0) * (x - 1.0) + 1.0
    } else if x < -c.p_b {
        -c.a_p * (x + 1.0) * (x + 1.0) - 1.0
    } else {
        c.k_m * x
    }
}

/// Componentwise shaping of a vector.
pub fn psat_vec(v: Vec3, c: &PsatCoefficients) -> Vec3 {
    Vec3([psat_scalar(v[0], c), psat_scalar(v[1], c), psat_scalar(v[2], c)])
}

// ─── Virtual rate ────────────────────────────────────────────────────────

/// Norm-bounded virtual rate command
/// `omega_v = -(|q_e0| M_omega / (2 sqrt(3))) G^{-1}(q_e) psat(q_ev)`.
///
/// Since the inverse Jacobian has spectral norm `2 / |q_e0|` and the shaped
/// vector is bounded by `sqrt(3)`, the norm never exceeds `M_omega`.
/// Errors when `|q_e0| <= 1e-6`.
pub fn virtual_rate(q_e: &Quat, gains: &ControllerGains) -> Result<Vec3> {
    let coeffs = PsatCoefficients::new(gains.p_b)?;
    let gi = gamma_inverse(q_e)?;
    let shaped = psat_vec(q_e.vec(), &coeffs);
    Ok(gi * shaped * (-q_e.w().abs() * gains.m_omega / (2.0 * 3.0_f64.sqrt())))
}

/// Backward-difference estimate of a sampled signal's rate, zero on the
/// first sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct BackwardDiff {
    prev: Option<Vec3>,
}

impl BackwardDiff {
    /// Push the sample taken `dt` after the previous one; returns the
    /// difference quotient.
    pub fn update(&mut self, sample: Vec3, dt: f64) -> Vec3 {
        let rate = match self.prev {
            Some(p) => (sample - p) * (1.0 / dt),
            None => Vec3::ZERO,
        };
        self.prev = Some(sample);
        rate
    }
}

// ─── Torque law ──────────────────────────────────────────────────────────

/// How the virtual-rate derivative feeds forward into the torque law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedforwardMode {
    /// `J * omega_v_dot`: cancels the rate-error cross terms exactly.
    InertiaWeighted,
    /// Raw `omega_v_dot`, no inertia weighting.
    Bare,
}

/// Smooth disturbance estimator `d_hat_i = D_m tanh(z2_i / mu_i)`.
pub fn disturbance_compensator(z2: Vec3, gains: &ControllerGains) -> Vec3 {
    Vec3([
        gains.d_m * (z2[0] / gains.mu[0]).tanh(),
        gains.d_m * (z2[1] / gains.mu[1]).tanh(),
        gains.d_m * (z2[2] / gains.mu[2]).tanh(),
    ])
}

/// Unconstrained torque command (before the limiter):
/// `tau = -lumped - K_w z2 - d_hat + ff - K_u xi - P_q`,
/// with the attitude feed `P_q = G(q_e) q_ev = (q_e0 / 2) q_ev` and `ff`
/// the virtual-rate feedforward selected by `mode`.
pub fn torque_command(
    q_e: &Quat,
    z2: Vec3,
    lumped: Vec3,
    omega_v_dot: Vec3,
    xi: Vec3,
    gains: &ControllerGains,
    inertia: &InertiaModel,
    mode: FeedforwardMode,
) -> Vec3 {
    let d_hat = disturbance_compensator(z2, gains);
    let ff = match mode {
        FeedforwardMode::InertiaWeighted => *inertia.j() * omega_v_dot,
        FeedforwardMode::Bare => omega_v_dot,
    };
    // G(q_e) q_ev reduces to (q_e0/2) q_ev: the vector part is an
    // eigenvector of the kinematics Jacobian
    let p_q = q_e.vec() * (q_e.w() / 2.0);
    let k_z = Vec3([
        gains.k_omega[0] * z2[0],
        gains.k_omega[1] * z2[1],
        gains.k_omega[2] * z2[2],
    ]);
    -lumped - k_z - d_hat + ff - xi * gains.k_u - p_q
}

/// Componentwise torque limiter.
pub fn saturate(tau: Vec3, u_max: f64) -> Vec3 {
    tau.map(|c| c.clamp(-u_max, u_max))
}

// ─── Anti-windup auxiliary system ────────────────────────────────────────

/// One step of the auxiliary dynamics
/// `xi_dot = -(p1 + p2 |dtau|^2 / max(|xi|^2, eps^2)) xi + K_tau tanh(dtau)`
/// under constant saturation deficit `dtau`.
///
/// The quenching coefficient is frozen at the step's initial state and the
/// resulting linear system is advanced exactly:
/// `xi' = xi e^(-a dt) + (B / a)(1 - e^(-a dt))`. The coefficient grows
/// without bound as `|xi| -> 0` (1e12 1/s at the floor), far beyond any
/// explicit stepper's stability region at practical step sizes, while the
/// exact update is unconditionally stable and lands on the same
/// quasi-equilibrium the continuous flow reaches. For the plain-decay
/// regime (`dtau = 0`) it reproduces `e^(-p1 t)` to rounding.
pub fn aux_step(xi: Vec3, delta_tau: Vec3, dt: f64, gains: &ControllerGains) -> Vec3 {
    let floor = gains.eps_xi * gains.eps_xi;
    let denom = xi.norm_sq().max(floor);
    let a = gains.p1 + gains.p2 * delta_tau.norm_sq() / denom;
    let b = delta_tau.map(f64::tanh) * gains.k_tau;
    let decay = (-a * dt).exp();
    xi * decay + b * ((1.0 - decay) / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::Mat3;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_gains() -> ControllerGains {
        ControllerGains {
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
        }
    }

    fn test_inertia() -> InertiaModel {
        InertiaModel::new(Mat3([
            [2.8, 0.002, 0.0076],
            [0.002, 2.6, 0.01],
            [0.0076, 0.01, 1.9],
        ]))
        .unwrap()
    }

    #[test]
    fn psat_frozen_values_at_default_knee() {
        let c = PsatCoefficients::new(0.6).unwrap();
        assert!((c.a_p - -1.5625).abs() < 1e-15);
        assert!((c.k_m - 1.25).abs() < 1e-15);
        assert!((psat_scalar(0.6, &c) - 0.75).abs() < 1e-15);
        assert!((psat_scalar(0.8, &c) - 0.9375).abs() < 1e-15);
        assert!((psat_scalar(1.0, &c) - 1.0).abs() < 1e-15);
        assert!((psat_scalar(-1.0, &c) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn psat_coefficients_match_joint_condition_solve() {
        // independent route: solve the 2x2 linear system given by value and
        // slope matching at the knee, unknowns (K_m, a_p):
        //   K_m * P_b - a_p (P_b-1)^2 = 1
        //   K_m       - 2 a_p (P_b-1) = 0
        for &p_b in &[0.3, 0.6, 0.9] {
            let (e, f) = (-(p_b - 1.0) * (p_b - 1.0), -2.0 * (p_b - 1.0));
            let det = p_b * f - e;
            let k_m = (1.0 * f - e * 0.0) / det;
            let a_p = (p_b * 0.0 - 1.0) / det;
            let c = PsatCoefficients::new(p_b).unwrap();
            assert!((c.k_m - k_m).abs() < 1e-12, "P_b = {p_b}");
            assert!((c.a_p - a_p).abs() < 1e-12, "P_b = {p_b}");
        }
    }

    #[test]
    fn psat_is_continuous_and_smooth_at_knees() {
        for &p_b in &[0.3, 0.6, 0.9] {
            let c = PsatCoefficients::new(p_b).unwrap();
            let h = 1e-7;
            for &x in &[p_b, -p_b] {
                let jump = (psat_scalar(x + h, &c) - psat_scalar(x - h, &c)).abs();
                assert!(jump < 1e-6, "C0 gap {jump} at {x}, P_b = {p_b}");
                let left = (psat_scalar(x, &c) - psat_scalar(x - h, &c)) / h;
                let right = (psat_scalar(x + h, &c) - psat_scalar(x, &c)) / h;
                assert!((left - right).abs() < 1e-6, "C1 gap at {x}, P_b = {p_b}");
            }
        }
    }

    #[test]
    fn psat_dominates_identity_and_stays_bounded() {
        for &p_b in &[0.3, 0.6, 0.9] {
            let c = PsatCoefficients::new(p_b).unwrap();
            let mut x = -1.0;
            while x <= 1.0 {
                let y = psat_scalar(x, &c);
                assert!(y.abs() >= x.abs() - 1e-15, "x = {x}, y = {y}, P_b = {p_b}");
                assert!(y.abs() <= 1.0 + 1e-15);
                // odd symmetry
                assert!((psat_scalar(-x, &c) + y).abs() < 1e-15);
                x += 1e-3;
            }
        }
    }

    #[test]
    fn noncontinuous_slope_variant_exhibits_the_gap() {
        let c = PsatCoefficients::new(0.6).unwrap();
        let alt = c.k_m_noncontinuous_variant();
        assert!((alt - 0.41666666666666663).abs() < 1e-12);
        // at the knee the alternative line sits at 0.25, the quadratic at 0.75
        let gap = (alt * 0.6 - (c.a_p * (0.6 - 1.0) * (0.6 - 1.0) + 1.0)).abs();
        assert!((gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn virtual_rate_single_axis_frozen_value() {
        let gains = default_gains();
        let q_e = Quat([0.6, 0.0, 0.0, 0.8]);
        let w = virtual_rate(&q_e, &gains).unwrap();
        // -(M_omega / sqrt(3)) * psat(0.6)
        let want = -(0.0175 / 3.0_f64.sqrt()) * 0.75;
        assert!((w[0] - want).abs() < 1e-12, "{} vs {want}", w[0]);
        assert!((w[0] - -7.577722283113837e-3).abs() < 1e-12);
        assert!(w[1].abs() < 1e-15);
        assert!(w[2].abs() < 1e-15);
    }

    #[test]
    fn virtual_rate_norm_never_exceeds_ceiling() {
        let gains = default_gains();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut tested = 0;
        while tested < 10_000 {
            let mut c = [0.0_f64; 4];
            for x in c.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
            let q = Quat(c);
            if q.norm() < 1e-3 {
                continue;
            }
            let q = q.renormalize().unwrap();
            if q.w().abs() < 0.01 {
                continue;
            }
            tested += 1;
            let w = virtual_rate(&q, &gains).unwrap();
            assert!(
                w.norm() <= gains.m_omega + 1e-12,
                "norm {} at q = {:?}",
                w.norm(),
                q
            );
        }
    }

    #[test]
    fn virtual_rate_errors_at_singular_scalar_part() {
        let gains = default_gains();
        let q = Quat([1.0, 0.0, 0.0, 1e-7]).renormalize().unwrap();
        assert!(virtual_rate(&q, &gains).is_err());
    }

    #[test]
    fn torque_command_frozen_single_axis_case() {
        let gains = default_gains();
        let inertia = test_inertia();
        let tau = torque_command(
            &Quat::IDENTITY,
            Vec3([0.01, 0.0, 0.0]),
            Vec3::ZERO,
            Vec3::ZERO,
            Vec3::ZERO,
            &gains,
            &inertia,
            FeedforwardMode::InertiaWeighted,
        );
        let want = -0.14 - 2e-3 * 1.0_f64.tanh();
        assert!((tau[0] - want).abs() < 1e-15, "{} vs {want}", tau[0]);
        assert!((tau[0] - -0.1415231883119115).abs() < 1e-12);
        assert!(tau[1].abs() < 1e-15);
        assert!(tau[2].abs() < 1e-15);
    }

    #[test]
    fn torque_command_is_affine_in_rate_error_when_estimator_flattens() {
        let mut gains = default_gains();
        gains.mu = Vec3([1e9, 1e9, 1e9]);
        let inertia = test_inertia();
        let q = Quat([0.2, -0.1, 0.3, 0.9]).renormalize().unwrap();
        let probe = |z: Vec3| {
            torque_command(
                &q,
                z,
                Vec3([0.01, -0.02, 0.005]),
                Vec3([1e-4, 0.0, -1e-4]),
                Vec3([0.05, 0.0, -0.02]),
                &gains,
                &inertia,
                FeedforwardMode::InertiaWeighted,
            )
        };
        let za = Vec3([0.013, -0.007, 0.021]);
        let zb = Vec3([-0.004, 0.016, -0.011]);
        let diff = probe(za) - probe(zb);
        let want = Vec3([
            -gains.k_omega[0] * (za[0] - zb[0]),
            -gains.k_omega[1] * (za[1] - zb[1]),
            -gains.k_omega[2] * (za[2] - zb[2]),
        ]);
        assert!((diff - want).max_abs() < 1e-9);
    }

    #[test]
    fn feedforward_modes_differ_by_inertia_weighting() {
        let gains = default_gains();
        let inertia = test_inertia();
        let wdot = Vec3([0.01, -0.02, 0.03]);
        let base = |mode| {
            torque_command(
                &Quat::IDENTITY,
                Vec3::ZERO,
                Vec3::ZERO,
                wdot,
                Vec3::ZERO,
                &gains,
                &inertia,
                mode,
            )
        };
        let diff = base(FeedforwardMode::InertiaWeighted) - base(FeedforwardMode::Bare);
        let want = *inertia.j() * wdot - wdot;
        assert!((diff - want).max_abs() < 1e-15);
    }

    #[test]
    fn backward_diff_starts_at_zero() {
        let mut d = BackwardDiff::default();
        assert_eq!(d.update(Vec3([1.0, 2.0, 3.0]), 0.1), Vec3::ZERO);
        let r = d.update(Vec3([1.1, 2.0, 2.9]), 0.1);
        assert!((r - Vec3([1.0, 0.0, -1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn aux_plain_decay_matches_exponential() {
        let mut gains = default_gains();
        gains.p1 = 1.0;
        let xi0 = Vec3([0.3, -0.4, 0.5]);
        let mut xi = xi0;
        for _ in 0..10 {
            xi = aux_step(xi, Vec3::ZERO, 0.1, &gains);
        }
        let want = xi0.norm() * (-1.0_f64).exp();
        assert!((xi.norm() - want).abs() < 1e-6, "{} vs {want}", xi.norm());
    }

    #[test]
    fn aux_stays_at_rest_without_deficit() {
        let gains = default_gains();
        let xi = aux_step(Vec3::ZERO, Vec3::ZERO, 0.1, &gains);
        assert_eq!(xi, Vec3::ZERO);
    }

    #[test]
    fn aux_from_rest_lands_on_quenched_equilibrium_not_a_spurious_jump() {
        // near xi = 0 the quenching coefficient is ~1e12 1/s; the step must
        // land on the tiny balance point instead of overshooting
        let gains = default_gains();
        let xi = aux_step(Vec3::ZERO, Vec3([0.3, 0.3, 0.3]), 0.1, &gains);
        assert!(xi.norm() < 1e-9, "norm {}", xi.norm());
        assert!(xi.norm() > 0.0);
    }

    #[test]
    fn aux_tracks_reference_integration_in_smooth_regime() {
        // with a weak quenching weight the flow has a genuine equilibrium
        // away from the stiff core: along the drive direction the radius
        // solves p1 s^2 - |B| s + p2 |dtau|^2 = 0 (upper root stable).
        // Oracle one: that algebraic fixed point. Oracle two: fine-step RK4,
        // valid here because the trajectory never approaches the core.
        let mut gains = default_gains();
        gains.p2 = 0.05;
        let dtau = Vec3([0.1, -0.05, 0.2]);
        let b = dtau.map(f64::tanh) * gains.k_tau;
        let d = dtau.norm_sq();
        let disc = b.norm_sq() - 4.0 * gains.p1 * gains.p2 * d;
        assert!(disc > 0.0, "test setup must admit an equilibrium");
        let s_eq = (b.norm() + disc.sqrt()) / (2.0 * gains.p1);
        let xi_eq = b * (s_eq / b.norm());

        let rhs = |xi: Vec3| -> Vec3 {
            let denom = xi.norm_sq().max(gains.eps_xi * gains.eps_xi);
            let a = gains.p1 + gains.p2 * dtau.norm_sq() / denom;
            xi * -a + b
        };
        let xi0 = Vec3([0.3, 0.2, -0.1]);
        let mut fine = xi0;
        let h = 1e-5;
        for _ in 0..300_000 {
            let k1 = rhs(fine);
            let k2 = rhs(fine + k1 * (h / 2.0));
            let k3 = rhs(fine + k2 * (h / 2.0));
            let k4 = rhs(fine + k3 * h);
            fine += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        let mut coarse = xi0;
        for _ in 0..30 {
            coarse = aux_step(coarse, dtau, 0.1, &gains);
        }
        assert!((fine - xi_eq).norm() < 1e-3, "fine {fine:?} vs eq {xi_eq:?}");
        assert!(
            (coarse - fine).norm() < 2e-3,
            "coarse {coarse:?} vs fine {fine:?}"
        );
    }

    #[test]
    fn aux_default_gains_quench_every_trajectory() {
        // 4 p1 p2 exceeds K_tau^2, so no equilibrium exists away from the
        // core: any deficit history drives xi to (numerically) zero. The
        // closed loop relies on this.
        let gains = default_gains();
        let mut xi = Vec3([0.3, 0.2, -0.1]);
        for _ in 0..100 {
            xi = aux_step(xi, Vec3([0.1, -0.05, 0.2]), 0.1, &gains);
        }
        assert!(xi.norm() < 1e-6, "norm {}", xi.norm());
    }

    #[test]
    fn aux_respects_input_to_state_bound() {
        // comparison system: |xi|' <= -p1 |xi| + K_tau sqrt(3), so
        // |xi| <= K_tau sqrt(3) / p1 + |xi_0| for all time
        let gains = default_gains();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let xi0 = Vec3([0.2, -0.1, 0.15]);
        let bound = gains.k_tau * 3.0_f64.sqrt() / gains.p1 + xi0.norm();
        let mut xi = xi0;
        for _ in 0..10_000 {
            let dtau = Vec3([
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            ]);
            xi = aux_step(xi, dtau, 0.1, &gains);
            assert!(xi.norm() <= bound + 1e-9, "norm {} > bound {bound}", xi.norm());
        }
    }

    #[test]
    fn gains_validation_pinpoints_offending_field() {
        let mut g = default_gains();
        g.p_b = 1.2;
        let err = g.validate("gains").unwrap_err().to_string();
        assert!(err.contains("gains.P_b"), "{err}");
        let mut g = default_gains();
        g.k_omega[2] = -1.0;
        assert!(g.validate("gains").is_err());
        assert!(default_gains().validate("gains").is_ok());
    }

    proptest! {
        #[test]
        fn saturate_is_idempotent_bounded_non_expansive(
            ax in -0.3_f64..0.3, ay in -0.3_f64..0.3, az in -0.3_f64..0.3,
            bx in -0.3_f64..0.3, by in -0.3_f64..0.3, bz in -0.3_f64..0.3,
        ) {
            let u_max = 0.05;
            let a = Vec3([ax, ay, az]);
            let b = Vec3([bx, by, bz]);
            let sa = saturate(a, u_max);
            let sb = saturate(b, u_max);
            prop_assert!(sa.max_abs() <= u_max);
            prop_assert_eq!(saturate(sa, u_max), sa);
            prop_assert!((sa - sb).norm() <= (a - b).norm() + 1e-15);
            for i in 0..3 {
                prop_assert!(sa[i] * a[i] >= 0.0);
                prop_assert!(sa[i].abs() <= a[i].abs() + 1e-15);
            }
        }

        #[test]
        fn psat_vector_norm_bounded_by_sqrt3(
            x in -1.0_f64..1.0, y in -1.0_f64..1.0, z in -1.0_f64..1.0,
            p_b in 0.05_f64..0.95,
        ) {
            let c = PsatCoefficients::new(p_b).unwrap();
            let v = psat_vec(Vec3([x, y, z]), &c);
            prop_assert!(v.norm() <= 3.0_f64.sqrt() + 1e-12);
            prop_assert!(v.norm() >= Vec3([x, y, z]).norm() - 1e-12);
        }
    }
}
