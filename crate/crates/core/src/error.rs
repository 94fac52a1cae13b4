use thiserror::Error;

/// Errors raised by measure construction, transport maps and inequality checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("density is not integrable: {0}")]
    NonIntegrable(String),

    #[error("quantile level {0} outside (0, 1)")]
    QuantileOutOfRange(f64),

    #[error("inverse CDF level {0} outside (0, 1)")]
    InverseOutOfRange(f64),

    #[error("angular mass ratio {ratio:.3e} exceeds {limit:.0e}")]
    AngularUnbounded { ratio: f64, limit: f64 },

    #[error("weight evaluated below r = {r_min:e}; limit value used")]
    DegenerateAtOrigin { r_min: f64 },

    #[error("eta is unbounded on the probe grid (still increasing near t = {at:e})")]
    EtaUnbounded { at: f64 },

    #[error("operation not supported: {0}")]
    ModeUnsupported(String),

    #[error("cost is not convex in |x - y|: {0}")]
    NonConvexCost(String),

    #[error("perturbation depends on the angle; radial reduction unavailable")]
    NonRadialPerturbation,

    #[error("instance size {size} exceeds limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },

    #[error("every probe diverged")]
    AllInfinite,

    #[error("radius {r} does not exceed threshold {threshold}")]
    RadiusTooSmall { r: f64, threshold: f64 },

    #[error("angular oscillation C(h) = {ch} is not 1")]
    NonConstantAngular { ch: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
