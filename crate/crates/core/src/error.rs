use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown density `{0}`")]
    UnknownDensity(String),

    #[error("invalid parameter for `{density}`: {reason}")]
    InvalidParameter { density: String, reason: String },

    /// Improper priors are analytic-only.
    #[error("density `{0}` is improper or has no sampler")]
    ImproperDensityUnsampleable(String),

    #[error("initial amount must be positive, got {0}")]
    NonpositiveInitialAmount(f64),

    #[error("event {{x1={x1}; omega2={omega2}; omega3={omega3}}} cannot occur under {process}")]
    EventInconsistentWithProcess {
        x1: f64,
        omega2: u8,
        omega3: u8,
        process: &'static str,
    },

    #[error("coin outcome must be 0 or 1, got {0}")]
    InvalidCoin(u8),

    #[error("invalid interval ({lo}, {hi}): need 0 < lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("observation {y} lies outside the bounds [{lower}, {upper}]")]
    ObservationOutsideBounds { y: f64, lower: f64, upper: f64 },

    #[error("no play landed in the conditioning window around y={y}")]
    ZeroConditionedSamples { y: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed density spec: {0}")]
    MalformedSpec(String),
}
