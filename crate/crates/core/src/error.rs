use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("ray starts inside the segment and runs along it")]
    DegenerateRay,

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("segment endpoints coincide or are not along a lattice side direction")]
    BadSegment,

    #[error("level {level} exceeds the configured budget of {max}")]
    LevelBudget { level: usize, max: usize },

    #[error("direction points out of the table at the start point")]
    OutwardDirection,

    #[error("ray leaves the table without hitting the boundary")]
    RayEscapes,

    #[error("value {0} is outside the allowed range")]
    OutOfRange(String),

    #[error("basepoint is compatible with a corner of the table")]
    CornerCompatible,

    #[error("initial basepoint has a terminating ternary expansion")]
    TernaryBasepoint,

    #[error("malformed billiard state: {0}")]
    MalformedState(String),

    #[error("invalid address word `{0}`")]
    InvalidAddress(String),

    #[error("cannot parse `{0}`")]
    Parse(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Errors in this class indicate a bug in the geometry kernel rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}
