//! Lyapunov bookkeeping and certificate verification.
//!
//! The run is scored by a three-part energy `V = V1 + V2 + V3` (attitude,
//! weighted rate error, auxiliary state). Each actuation interval admits a
//! closed-form exponential upper bound; extending every interval's bound
//! to the whole time axis and taking the pointwise maximum yields a global
//! envelope `U_V(t)` that a healthy run must stay under. A separate
//! judgment curve `J2(t)` bounds `V2` during coast phases.

use crate::attitude::{InertiaModel, Vec3};
use crate::controller::ControllerGains;
use crate::error::{Error, Result};
use crate::trigger::{turn_on_threshold, EventKind, EventRecord, TriggerMode, TriggerParams};
use serde::{Deserialize, Serialize};

// ─── Lyapunov values ─────────────────────────────────────────────────────

/// `V1 = |q_ev|^2 / 2`, `V2 = z2' J z2 / 2`, `V3 = |xi|^2 / 2`, and their
/// sum.
pub fn lyapunov_values(q_ev: Vec3, z2: Vec3, xi: Vec3, inertia: &InertiaModel) -> (f64, f64, f64, f64) {
    let v1 = 0.5 * q_ev.norm_sq();
    let v2 = 0.5 * z2.dot(*inertia.j() * z2);
    let v3 = 0.5 * xi.norm_sq();
    (v1, v2, v3, v1 + v2 + v3)
}

/// One scored telemetry instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v: f64,
    pub j2: f64,
    pub mode: TriggerMode,
}

/// Coast-phase judgment curve
/// `J2(t) = (lambda_max / 2) [(rho0 - rho_inf) e^(-gamma t) + rho_inf]`.
pub fn judgment_j2(t: f64, lambda_max: f64, params: &TriggerParams) -> f64 {
    0.5 * lambda_max * turn_on_threshold(t, params)
}

// ─── Stability constants ─────────────────────────────────────────────────

/// Closed-form constants of the certificate, with positivity flags. The
/// envelope machinery is meaningful only when `valid` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    /// Young-inequality weight pairing staleness with the energy level.
    pub b1: f64,
    /// Young-inequality weight pairing the coast-phase attitude decay with
    /// the rate error.
    pub b2: f64,
    /// Largest inertia eigenvalue.
    pub lambda_max: f64,
    /// Smallest inertia eigenvalue.
    pub lambda_min: f64,
    /// Lower bound on `|q_e0(t)|` along the run, estimated from the
    /// initial condition unless overridden.
    pub q_e0_min: f64,
    /// Virtual-rate norm floor `M_omega / sqrt(3)`.
    pub b_omega: f64,
    /// `K_omega_min - (b1 + K_u + 1) / 2`.
    pub c1: f64,
    /// `p1 - (K_u + K_tau) / 2`.
    pub c2: f64,
    /// `p2 - (K_tau + 1) / 2`.
    pub c3: f64,
    /// ON-interval decay rate `min(q_e0_min B_omega, 2 C1 / lambda_max,
    /// 2 C2)`.
    pub c_t: f64,
    /// OFF-interval decay rate `min(q_e0_min B_omega - b2, 2 C2)`.
    pub c_d: f64,
    /// Estimator slack `0.2785 (mu_1 + mu_2 + mu_3) D_m-free floor`.
    pub d0: f64,
    /// ON-interval drive level `D0 + b / (2 b1)`.
    pub n_k: f64,
    /// OFF-interval drive level `rho_inf / (2 b2)` (worst case of the
    /// time-varying floor).
    pub n_f: f64,
    pub c1_positive: bool,
    pub c2_positive: bool,
    pub c3_positive: bool,
    pub c_t_positive: bool,
    pub c_d_positive: bool,
    /// All positivity conditions met.
    pub valid: bool,
}

/// Assemble the certificate constants from gains, the inertia spectrum and
/// the trigger parameters. `q_e0_min` must lie in (0, 1]; it is not derived
/// here because the natural estimate is the run's initial `|q_e0|`.
pub fn stability_constants(
    gains: &ControllerGains,
    q_e0_min: f64,
    inertia: &InertiaModel,
    params: &TriggerParams,
) -> Result<StabilityConstants> {
    if !(q_e0_min.is_finite() && q_e0_min > 0.0 && q_e0_min <= 1.0) {
        return Err(Error::invalid(
            "q_e0_min",
            format!("must lie in (0, 1], got {q_e0_min}"),
        ));
    }
    let lambda_max = inertia.lambda_max();
    let lambda_min = inertia.lambda_min();
    let b_omega = gains.m_omega / 3.0_f64.sqrt();
    let c1 = gains.k_omega_min() - (gains.b1 + gains.k_u + 1.0) / 2.0;
    let c2 = gains.p1 - (gains.k_u + gains.k_tau) / 2.0;
    let c3 = gains.p2 - (gains.k_tau + 1.0) / 2.0;
    let c_t = (q_e0_min * b_omega).min(2.0 * c1 / lambda_max).min(2.0 * c2);
    let c_d = (q_e0_min * b_omega - gains.b2).min(2.0 * c2);
    let d0 = 0.2785 * (gains.mu[0] + gains.mu[1] + gains.mu[2]);
    let n_k = d0 + params.b / (2.0 * gains.b1);
    let n_f = params.rho_inf / (2.0 * gains.b2);
    let c1_positive = c1 > 0.0;
    let c2_positive = c2 > 0.0;
    let c3_positive = c3 > 0.0;
    let c_t_positive = c_t > 0.0;
    let c_d_positive = c_d > 0.0;
    Ok(StabilityConstants {
        b1: gains.b1,
        b2: gains.b2,
        lambda_max,
        lambda_min,
        q_e0_min,
        b_omega,
        c1,
        c2,
        c3,
        c_t,
        c_d,
        d0,
        n_k,
        n_f,
        c1_positive,
        c2_positive,
        c3_positive,
        c_t_positive,
        c_d_positive,
        valid: c1_positive && c2_positive && c3_positive && c_t_positive && c_d_positive,
    })
}

impl StabilityConstants {
    /// Names of the positivity conditions that failed, empty when valid.
    pub fn failed_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.c1_positive {
            out.push("C1 > 0");
        }
        if !self.c2_positive {
            out.push("C2 > 0");
        }
        if !self.c3_positive {
            out.push("C3 > 0");
        }
        if !self.c_t_positive {
            out.push("C_t > 0");
        }
        if !self.c_d_positive {
            out.push("C_d > 0");
        }
        out
    }
}

/// Residual levels the energy settles into: `r_on = N_k / C_t` after
/// ON-dominated transients, `r_off = N_f / C_d + lambda_max rho_inf / 2`
/// after coast phases, and their maximum as the final guarantee.
pub fn residual_bounds(consts: &StabilityConstants, params: &TriggerParams) -> Result<(f64, f64, f64)> {
    if !consts.valid {
        return Err(Error::Constants {
            why: format!("certificate conditions failed: {}", consts.failed_conditions().join(", ")),
        });
    }
    let r_on = consts.n_k / consts.c_t;
    let r_off = consts.n_f / consts.c_d + 0.5 * consts.lambda_max * params.rho_inf;
    Ok((r_on, r_off, r_on.max(r_off)))
}

// ─── Interval bounds and the global envelope ─────────────────────────────

/// Which closed-form bound a segment instantiates. ON intervals decay at
/// `beta` when `C_t >= beta` (fast) or at `C_t` with a dwell-time
/// inflation otherwise (slow); OFF intervals likewise with `gamma`, `C_d`
/// and the measured maximum coast length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    #[serde(rename = "ON_fast")]
    OnFast,
    #[serde(rename = "ON_slow")]
    OnSlow,
    #[serde(rename = "OFF_fast")]
    OffFast,
    #[serde(rename = "OFF_slow")]
    OffSlow,
}

/// One interval's exponential bound. Although anchored at `t_trig`, the
/// curve `(initial - asymptote) e^(-rate (t - t_trig)) + asymptote` is a
/// restriction of a single exponential defined on all of `t >= 0`, so
/// evaluating it outside its home interval is the whole-domain extension
/// used by the global envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSegment {
    pub t_trig: f64,
    pub kind: SegmentKind,
    pub initial_value: f64,
    pub asymptote: f64,
    pub rate: f64,
}

impl EnvelopeSegment {
    pub fn value_at(&self, t: f64) -> f64 {
        (self.initial_value - self.asymptote) * (-self.rate * (t - self.t_trig)).exp() + self.asymptote
    }
}

/// Bound for an actuator-on interval anchored at the opening instant with
/// the sampled energy `v_at_on`.
pub fn on_interval_bound(
    v_at_on: f64,
    t_on: f64,
    consts: &StabilityConstants,
    params: &TriggerParams,
) -> EnvelopeSegment {
    let asymptote = consts.n_k / consts.c_t;
    if consts.c_t >= params.beta {
        EnvelopeSegment {
            t_trig: t_on,
            kind: SegmentKind::OnFast,
            initial_value: v_at_on,
            asymptote,
            rate: params.beta,
        }
    } else {
        // slow decay cannot outrun the staleness envelope; the dwell cap
        // bounds the accumulated gap
        let m_k = params.a * (-params.beta * t_on).exp() / (2.0 * consts.b1);
        EnvelopeSegment {
            t_trig: t_on,
            kind: SegmentKind::OnSlow,
            initial_value: v_at_on + m_k * params.t_max_s,
            asymptote,
            rate: consts.c_t,
        }
    }
}

/// Bound for a coast interval anchored at the closing instant with the
/// lumped energy `v_a_at_off = V1 + V3 + J2` sampled there. `t_maxoff` is
/// the longest observed coast, needed only by the slow branch.
pub fn off_interval_bound(
    v_a_at_off: f64,
    t_off: f64,
    t_maxoff: f64,
    consts: &StabilityConstants,
    params: &TriggerParams,
) -> EnvelopeSegment {
    let asymptote = consts.n_f / consts.c_d + 0.5 * consts.lambda_max * params.rho_inf;
    if consts.c_d >= params.gamma {
        EnvelopeSegment {
            t_trig: t_off,
            kind: SegmentKind::OffFast,
            initial_value: v_a_at_off,
            asymptote,
            rate: params.gamma,
        }
    } else {
        let m_f = params.rho0 * (-params.gamma * t_off).exp() / (2.0 * consts.b2);
        EnvelopeSegment {
            t_trig: t_off,
            kind: SegmentKind::OffSlow,
            initial_value: v_a_at_off + m_f * t_maxoff,
            asymptote,
            rate: consts.c_d,
        }
    }
}

// ─── Envelope verification ───────────────────────────────────────────────

/// A sample that reached or crossed the global envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeViolation {
    pub index: usize,
    pub t: f64,
    pub v: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub segments: Vec<EnvelopeSegment>,
    pub violations: Vec<EnvelopeViolation>,
    /// Minimum of `U_V(t) - V(t)` over all samples. Zero at segment
    /// anchors is expected; negative means a violation.
    pub min_margin: f64,
    /// Longest observed coast interval, s (domain edges included).
    pub t_maxoff: f64,
}

fn sample_index_at(samples: &[LyapunovSample], t: f64) -> Result<usize> {
    let idx = samples.partition_point(|s| s.t < t - 1e-9);
    if idx < samples.len() && (samples[idx].t - t).abs() < 1e-6 {
        Ok(idx)
    } else {
        Err(Error::Timeline {
            why: format!("event at t = {t} has no matching telemetry sample"),
        })
    }
}

fn check_event_log(samples: &[LyapunovSample], events: &[EventRecord]) -> Result<()> {
    for (i, e) in events.iter().enumerate() {
        let is_on = e.kind == EventKind::TurnOn;
        if is_on != (i % 2 == 0) {
            return Err(Error::Timeline {
                why: format!("event log does not alternate at index {i}"),
            });
        }
        if i > 0 && e.t <= events[i - 1].t {
            return Err(Error::Timeline {
                why: format!("event times not increasing at index {i}"),
            });
        }
        sample_index_at(samples, e.t)?;
    }
    Ok(())
}

/// Longest coast interval in the log, counting the leading stretch before
/// the first turn-on and the trailing stretch after an unclosed turn-off.
pub fn measure_t_maxoff(events: &[EventRecord], t_start: f64, t_end: f64) -> f64 {
    let mut longest: f64 = 0.0;
    let mut off_since = Some(t_start);
    for e in events {
        match e.kind {
            EventKind::TurnOn => {
                if let Some(t0) = off_since.take() {
                    longest = longest.max(e.t - t0);
                }
            }
            EventKind::TurnOffActive | EventKind::TurnOffPassive => {
                off_since = Some(e.t);
            }
        }
    }
    if let Some(t0) = off_since {
        longest = longest.max(t_end - t0);
    }
    longest
}

/// Build every interval's bound, extend each over the whole run, take the
/// pointwise maximum, and flag samples that reach it. The pre-first-event
/// stretch is treated as a coast anchored at the first sample.
pub fn envelope_check(
    samples: &[LyapunovSample],
    events: &[EventRecord],
    consts: &StabilityConstants,
    params: &TriggerParams,
) -> Result<EnvelopeReport> {
    if samples.is_empty() {
        return Err(Error::Timeline { why: "no telemetry samples".into() });
    }
    for w in samples.windows(2) {
        if w[1].t <= w[0].t {
            return Err(Error::Timeline {
                why: format!("sample times not increasing near t = {}", w[0].t),
            });
        }
    }
    if !consts.valid {
        return Err(Error::Constants {
            why: format!("certificate conditions failed: {}", consts.failed_conditions().join(", ")),
        });
    }
    check_event_log(samples, events)?;

    let t_start = samples[0].t;
    let t_end = samples[samples.len() - 1].t;
    let t_maxoff = measure_t_maxoff(events, t_start, t_end);

    let mut segments = Vec::with_capacity(events.len() + 1);
    let s0 = samples[0];
    segments.push(off_interval_bound(s0.v1 + s0.v3 + s0.j2, s0.t, t_maxoff, consts, params));
    for e in events {
        let s = samples[sample_index_at(samples, e.t)?];
        segments.push(match e.kind {
            EventKind::TurnOn => on_interval_bound(s.v, s.t, consts, params),
            EventKind::TurnOffActive | EventKind::TurnOffPassive => {
                off_interval_bound(s.v1 + s.v3 + s.j2, s.t, t_maxoff, consts, params)
            }
        });
    }

    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (index, s) in samples.iter().enumerate() {
        let bound = segments
            .iter()
            .map(|seg| seg.value_at(s.t))
            .fold(f64::NEG_INFINITY, f64::max);
        let margin = bound - s.v;
        min_margin = min_margin.min(margin);
        // anchors sit exactly on their own segment; only a genuine crossing
        // beyond rounding noise counts
        if s.v >= bound + 1e-12 * bound.abs().max(1.0) {
            violations.push(EnvelopeViolation { index, t: s.t, v: s.v, bound });
        }
    }
    Ok(EnvelopeReport { segments, violations, min_margin, t_maxoff })
}

// ─── Coast-phase judgment check ──────────────────────────────────────────

/// A coast sample whose `V2` exceeded `J2(t)` outside any permitted
/// reaction window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct J2Violation {
    pub index: usize,
    pub t: f64,
    pub v2: f64,
    pub j2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct J2Report {
    pub violations: Vec<J2Violation>,
    /// Samples excused because they fell between a turn-on condition
    /// firing and the actuator actually opening.
    pub permitted_exceedances: usize,
}

/// Check `V2 <= J2` on every coast sample. With a coarse actuation grid
/// the rate error may legitimately grow between the instant the turn-on
/// condition fires and the next grid instant; exceedances inside each
/// closed window [first firing after the previous close, opening instant]
/// are counted but not flagged. The firing instants are reconstructed from
/// the telemetry itself by re-evaluating the turn-on condition.
pub fn j2_exceedance_check(
    samples: &[LyapunovSample],
    z2_sq: &[f64],
    events: &[EventRecord],
    params: &TriggerParams,
) -> Result<J2Report> {
    if z2_sq.len() != samples.len() {
        return Err(Error::Timeline {
            why: format!(
                "rate-error series length {} does not match {} samples",
                z2_sq.len(),
                samples.len()
            ),
        });
    }
    check_event_log(samples, events)?;
    // windows in which V2 may exceed J2: from the first coast sample whose
    // z2_sq is above the turn-on threshold (after the previous close) to
    // the opening instant
    let mut windows = Vec::new();
    let mut search_from = 0usize;
    for e in events {
        match e.kind {
            EventKind::TurnOn => {
                let on_idx = sample_index_at(samples, e.t)?;
                let mut start = on_idx;
                for i in search_from..on_idx {
                    if samples[i].mode == TriggerMode::Off && z2_sq[i] > turn_on_threshold(samples[i].t, params) {
                        start = i;
                        break;
                    }
                }
                windows.push((samples[start].t, e.t));
            }
            EventKind::TurnOffActive | EventKind::TurnOffPassive => {
                search_from = sample_index_at(samples, e.t)?;
            }
        }
    }
    // a trailing pending stretch: condition fired after the last close but
    // the run ended before the grid instant
    let t_end = samples.last().map(|s| s.t).unwrap_or(0.0);
    for i in search_from..samples.len() {
        if samples[i].mode == TriggerMode::Off && z2_sq[i] > turn_on_threshold(samples[i].t, params) {
            windows.push((samples[i].t, t_end));
            break;
        }
    }

    let mut violations = Vec::new();
    let mut permitted = 0usize;
    for (index, s) in samples.iter().enumerate() {
        if s.mode != TriggerMode::Off || s.v2 <= s.j2 {
            continue;
        }
        if windows.iter().any(|&(a, b)| s.t >= a - 1e-9 && s.t <= b + 1e-9) {
            permitted += 1;
        } else {
            violations.push(J2Violation { index, t: s.t, v2: s.v2, j2: s.j2 });
        }
    }
    Ok(J2Report { violations, permitted_exceedances: permitted })
}
