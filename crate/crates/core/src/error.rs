use alloc::string::String;

/// Everything that can go wrong inside the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degree sequence is empty")]
    EmptySequence,
    #[error("need at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("total degree {0} is odd, half-edges cannot be paired")]
    OddTotal(u64),
    #[error("vertex {vertex} has degree {degree}, every degree must be at least 2")]
    DegreeTooSmall { vertex: usize, degree: u64 },
    #[error("cannot parse degree token {token:?} (record {record})")]
    ParseDegree { record: usize, token: String },
    #[error("half-edge {index} out of range for {len} half-edges")]
    HalfEdgeOutOfRange { index: u64, len: usize },
    #[error("size mismatch: {left} vs {right} half-edges")]
    SizeMismatch { left: usize, right: usize },
    #[error("k = {k} outside [2, {m}]")]
    KOutOfRange { k: usize, m: usize },
    #[error("alpha = {0} outside (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("epsilon = {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("{what} = {size} exceeds the exact-computation limit {limit}")]
    ScaleGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("integer overflow while evaluating {0} exactly")]
    Overflow(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid segmented path: {0}")]
    InvalidPath(String),
    #[error(
        "paths are not isomorphic: window [{start}, {end}] has {left} vs {right} distinct half-edges"
    )]
    NotIsomorphic {
        start: usize,
        end: usize,
        left: usize,
        right: usize,
    },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
