use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Breakpoints do not describe a member of the curve set F.
    #[error("malformed curve: {0}")]
    MalformedCurve(&'static str),

    /// A deconvolution whose supremum diverges.
    #[error(
        "unbounded deconvolution: arrival rate {arrival_rate} exceeds service rate {service_rate}"
    )]
    Unbounded {
        arrival_rate: f64,
        service_rate: f64,
    },

    /// Long-run load reaches or exceeds the available service rate.
    #[error("unstable: load {load} is not below service rate {rate}")]
    Unstable { load: f64, rate: f64 },

    /// The fixed-point iteration did not settle within its budget.
    #[error("no convergence after {iterations} iterations (last change {last_change})")]
    NonConvergence { iterations: usize, last_change: f64 },

    /// A scenario that violates its structural invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A simulation setup the slotted simulator cannot represent.
    #[error("invalid simulation: {0}")]
    InvalidSimulation(String),
}

impl Error {
    pub fn is_instability(&self) -> bool {
        matches!(self, Error::Unstable { .. } | Error::Unbounded { .. })
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}
