use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a rotation: orthogonality residual {ortho:e}, determinant {det}")]
    NotARotation { ortho: f64, det: f64 },

    #[error("matrix is not skew-symmetric: asymmetry {asymmetry:e}")]
    NotSkewSymmetric { asymmetry: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("inertia tensor is not symmetric (asymmetry {0:e})")]
    InertiaNotSymmetric(f64),

    #[error("inertia tensor is not positive definite")]
    InertiaNotPositiveDefinite,

    #[error("center-of-mass direction must be a unit vector (norm {0})")]
    NonUnitChi(f64),

    #[error("{0} requires an unbroken symmetry (potential strength must be zero, got {1})")]
    BrokenSymmetry(&'static str, f64),

    #[error("invalid step size {0}: must be positive and finite")]
    InvalidStep(f64),

    #[error("number of steps must be at least 1")]
    NoSteps,

    #[error("state became non-finite at step {step} (t = {time})")]
    Diverged { step: usize, time: f64 },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("scenario '{scenario}': {reason}")]
    InvalidScenario { scenario: String, reason: String },

    #[error("trajectory has {0} samples, at least {1} required")]
    TrajectoryTooShort(usize, usize),

    #[error("trajectory has no '{0}' diagnostic")]
    MissingDiagnostic(&'static str),

    #[error("no evaluation points given")]
    NoPoints,

    #[error("the extended bracket needs an advected parameter at the evaluation point")]
    MissingAlpha,
}

pub type Result<T> = std::result::Result<T, Error>;
