//! One error type for the whole crate.
//!
//! Config problems keep the offending field path so the CLI can print
//! `gains.P_b: must lie in (0, 1)` instead of a bare message.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Bad input value. `field` is a dotted path when the value came from a
    /// config document, or a short name for direct API calls.
    Invalid { field: String, why: String },
    /// A guarded quantity got too close to a singularity (for example the
    /// scalar error-quaternion component in the virtual-rate inverse).
    Singular { what: &'static str, value: f64 },
    /// The state stopped being finite while integrating.
    Diverged { t: f64 },
    /// Trigger or event-log sequencing violated (non-monotone time, event
    /// without a matching sample, events that do not alternate).
    Timeline { why: String },
    /// Stability constants violate a positivity condition where validity is
    /// required to proceed.
    Constants { why: String },
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid { field, why } => write!(f, "{field}: {why}"),
            Error::Singular { what, value } => {
                write!(f, "singular {what} (value {value:e})")
            }
            Error::Diverged { t } => write!(f, "state diverged at t = {t} s"),
            Error::Timeline { why } => write!(f, "timeline error: {why}"),
            Error::Constants { why } => write!(f, "stability constants: {why}"),
            Error::Io(e) => write!(f, "io: {e}"),
            Error::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

impl Error {
    pub fn invalid(field: impl Into<String>, why: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), why: why.into() }
    }
}
