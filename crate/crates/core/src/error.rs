use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("partition needs at least 50 regions, got N = {0}")]
    TooFewRegions(usize),

    #[error("rounding sequence is infeasible: {0}")]
    InfeasibleRounding(String),

    #[error("spherical cap angle must lie in (0, pi/2], got {0}")]
    CapAngleOutOfRange(f64),

    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),

    #[error("quadrature did not converge for degree m = {m} (estimated error {estimate:e})")]
    QuadratureNonConvergence { m: usize, estimate: f64 },

    #[error("length mismatch: {what} (expected {expected}, got {got})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("filter stores degrees up to {filter}, but degree {needed} is required")]
    FilterTooShort { filter: usize, needed: usize },

    #[error("all multipliers up to degree {0} vanish, nothing is observable")]
    NoActiveMultipliers(usize),

    #[error("family has {nodes} nodes but degree {m} needs at least {needed}")]
    TooFewNodes { nodes: usize, m: usize, needed: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular value decomposition failed to converge")]
    SvdFailure,
}
