use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("join level {level} must exceed the levels of both children (max {child_max})")]
    InvalidLevel { level: u32, child_max: u32 },

    #[error("unknown ground point id {id} (ground space has {len} points)")]
    UnknownId { id: usize, len: usize },

    #[error("duplicate ground label {0:?}")]
    DuplicateLabel(String),

    #[error("matrix must be {expected}x{expected}, got {got} entries")]
    NotSquare { expected: usize, got: usize },

    #[error("non-finite value at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("distance is not a metric: {check} violated by {witness:?} (worst {worst:e})")]
    NotAMetric {
        check: String,
        witness: Vec<usize>,
        worst: f64,
    },

    #[error("empty region")]
    EmptyRegion,

    #[error("point {0} is not covered by any set of the cover")]
    Uncovered(usize),

    #[error("barycentric coordinates must be positive and sum to 1 (sum = {sum})")]
    InvalidBarycentric { sum: f64 },

    #[error("vertex {0} has no label")]
    MissingLabel(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid group action: {0}")]
    InvalidGroup(String),

    #[error(
        "function is not invariant under the group: witness {witness:?}, deviation {deviation:e}"
    )]
    NotInvariant { witness: Vec<usize>, deviation: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}
