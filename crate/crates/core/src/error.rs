use thiserror::Error;

use crate::chernoff::RateResult;
use crate::oracle::BlahutArimoto;
use crate::rd::RdPoint;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports.
///
/// Boundary cases where a finite answer still exists (extreme levels, the
/// minimum-distortion boundary, distortion above the zero-force point,
/// unconverged Blahut–Arimoto) carry that answer as a payload.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("level {level} lies outside the support [{min}, {max}]")]
    LevelInfeasible { level: f64, min: f64, max: f64 },

    #[error("level {} sits on a support extreme; rate {} at infinite force", .0.level, .0.rate)]
    LevelExtreme(RateResult),

    #[error("invalid partition: {0}")]
    PartitionInvalid(String),

    #[error("support mismatch: value {value} has mass under q but not under p")]
    SupportMismatch { value: f64 },

    #[error("distortion {distortion} is not above the minimum achievable {min}")]
    DistortionTooLow {
        distortion: f64,
        min: f64,
        /// Limit point at `distortion == min`, with `s = -inf`.
        boundary: Option<Box<RdPoint>>,
    },

    #[error("distortion {distortion} exceeds the zero-force distortion {zero_force}; rate is 0")]
    DistortionAboveZeroForce { distortion: f64, zero_force: f64, point: Box<RdPoint> },

    #[error("channel output {output} has zero probability")]
    ChannelDegenerate { output: usize },

    #[error("distortion pair ({d1}, {d2}) is jointly infeasible")]
    InfeasiblePair { d1: f64, d2: f64 },

    #[error("length {length} outside the achievable range ({min}, {max})")]
    LengthInfeasible { length: f64, min: f64, max: f64 },

    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),

    #[error("energy {energy} outside the achievable range [{min}, {max}]")]
    EnergyInfeasible { energy: f64, min: f64, max: f64 },

    #[error("composition n*P(x) = {value} is not an integer")]
    CompositionNotIntegral { value: f64 },

    #[error("alphabet of size {size} exceeds the brute-force limit {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize, best: Box<BlahutArimoto> },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput { field: field.into(), reason: reason.into() }
    }

    /// `true` for solver failures, `false` for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Numerical(_) | Error::InfeasiblePair { .. }
        )
    }

    /// Prefixes the field name of an input error, e.g. with a config key.
    pub fn in_field(self, field: &str) -> Self {
        match self {
            Error::InvalidInput { field: inner, reason } => Error::InvalidInput {
                field: if inner.is_empty() { field.to_string() } else { format!("{field}.{inner}") },
                reason,
            },
            other => other,
        }
    }
}
