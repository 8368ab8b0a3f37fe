use thiserror::Error;

/// Errors shared across the geometry, isotropy and diagnostic layers.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("halfspace intersection has empty interior")]
    EmptyIntersection,
    #[error("rejection sampler acceptance rate {0:.3e} below 1e-4; precondition the body")]
    LowAcceptance(f64),
    #[error("perturbation apex lies inside the body")]
    PointInside,
    #[error("body is not centrally symmetric")]
    NotSymmetric,
    #[error("body is not isotropic: residual {0:.3e} exceeds tolerance {1:.3e}")]
    NotIsotropic(f64, f64),
    #[error("schedule has too few usable points ({0}); need at least {1}")]
    InsufficientSchedule(usize, usize),
    #[error("point is not on the boundary (distance {0:.3e})")]
    NotOnBoundary(f64),
    #[error("no unique normal at the given boundary point")]
    NonUniqueNormal,
    #[error("quadrature did not reach the requested tolerance (best {0:.3e})")]
    QuadratureFailure(f64),
    #[error("unsupported dimension {0}: supported range is 2..=6")]
    UnsupportedDimension(usize),
    #[error("run log format version {found} (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("corrupt run log file: {0}")]
    CorruptFile(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;
