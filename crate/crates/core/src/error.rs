use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("leaf index {index} out of range for arity {arity}")]
    LeafOutOfRange { index: usize, arity: usize },

    #[error("arity {0} outside supported range")]
    UnsupportedArity(usize),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("matrix is not orthogonal (deviation {0:e})")]
    NotOrthogonal(f64),

    #[error("coincident points {0} and {1}")]
    CoincidentPoints(usize, usize),

    #[error("configuration needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("point lies on the boundary; no honest configuration exists")]
    BoundaryPoint,

    #[error("point is not on the boundary (no edge with u = 0)")]
    NotBoundary,

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("configuration sits at the cluster detection threshold: {0}")]
    ThresholdAmbiguity(String),

    #[error("unknown sample region `{0}`")]
    UnknownRegion(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::Invariant {
        invariant,
        detail: detail.into(),
    }
}
