use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Values are carried as `f64` so the enum stays independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("k = {k} lies within {guard:e} of a pole of bond {bond}")]
    PoleProximity { k: f64, bond: usize, guard: f64 },

    #[error("no sign change of the spectral function on ({a}, {b})")]
    NonBracketing { a: f64, b: f64 },

    #[error("cluster {m} overlaps its neighbours: pole {pole} deviates by {deviation} from (m+1/2)pi/L")]
    ClusterOverlap { m: usize, pole: f64, deviation: f64 },

    #[error("cluster {m} is empty")]
    EmptyCluster { m: usize },

    #[error("renormalized offset is undefined: {0}")]
    SigmaUndefined(String),

    #[error("operation not supported for this bond family: {0}")]
    UnsupportedFamily(String),

    #[error("divergent sum or integral: {0}")]
    Divergence(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {est:e})")]
    QuadratureFailed { tol: f64, est: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
