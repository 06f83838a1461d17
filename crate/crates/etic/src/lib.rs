//! Deterministic simulator and analysis toolkit for intermittent
//! spacecraft attitude tracking.
//!
//! A rigid body tracks a moving attitude reference under bounded torque,
//! a body-rate ceiling, and an actuator that is switched on and off by a
//! pair of event triggers: a torque-staleness test decides when a powered
//! interval has stopped earning its keep, and a rate-error test decides
//! when the actuator must wake up again. Between the two sits a
//! sample-and-hold command path, so control effort is spent in short
//! bursts separated by pure coasting.
//!
//! The crate has three layers:
//! * models (`attitude`, `plant`, `controller`, `trigger`): pure state
//!   math, no I/O;
//! * the loop (`sim`): fixed-step propagation producing telemetry, an
//!   event log, and summary metrics, bit-identical across reruns;
//! * certificates (`analysis`): stability constants, per-interval decay
//!   envelopes, and an envelope checker that audits a finished run.
//!
//! Start with the runnable examples (`cargo run --example tracking_run`)
//! or the thin CLI (`cargo run -- run --config configs/default.json`).

pub mod analysis;
pub mod attitude;
pub mod config;
pub mod controller;
pub mod error;
pub mod output;
pub mod plant;
pub mod sim;
pub mod trigger;

pub use error::{Error, Result};
