use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{kind} index {index} out of range (len {len})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        len: usize,
    },
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{what}[{index}] = {value} is outside [0, 1]")]
    OutOfUnitInterval {
        what: &'static str,
        index: usize,
        value: Rational,
    },
    #[error("point is not a fractional b-matching: x(delta({vertex})) = {load} > b({vertex}) = {capacity}")]
    InfeasiblePoint {
        vertex: usize,
        load: Rational,
        capacity: u32,
    },
    #[error(
        "edge set is not a b-matching: vertex {vertex} is covered {count} times but b = {capacity}"
    )]
    NotABMatching {
        vertex: usize,
        count: usize,
        capacity: u32,
    },
    #[error(
        "exponential-clocks sampling only supports b = 1 (vertex {vertex} has b = {capacity}); \
         extending it to b-matching is an open question"
    )]
    CapacityNotUnit { vertex: usize, capacity: u32 },
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: Rational },
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("simplex exceeded its pivot cap of {cap}")]
    IterationCap { cap: u64 },
    #[error("{what} requires at most {limit} edges, got {found}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        found: usize,
    },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("trace does not match instance: {0}")]
    TraceMismatch(String),
    #[error("distribution violates its contract: {0}")]
    InvalidDistribution(String),
    #[error("num_samples must be at least 1")]
    ZeroSamples,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
