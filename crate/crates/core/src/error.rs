use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gain interval: a={a} > b={b}")]
    EmptyGainInterval { a: i64, b: i64 },

    #[error("vertex count must be at least 1, got {0}")]
    BadVertexCount(usize),

    #[error("invalid edge {0}: {1}")]
    BadEdge(String, String),

    #[error("duplicate edge {0}")]
    DuplicateEdge(String),

    #[error("edge sequence is not a circle: {0}")]
    NotACircle(String),

    #[error("edge set is not a tree: {0}")]
    NotATree(String),

    #[error("edge set is not a forest: {0}")]
    NotAForest(String),

    #[error("empty support")]
    EmptySupport,

    #[error("height function does not attain 0")]
    HeightNotNormalized,

    #[error("height function undefined on vertex {0}")]
    HeightUndefined(usize),

    #[error("selected subgraph is not connected on the given support")]
    NotConnected,

    #[error("operation requires a+b in {{0,1}}, got a={a}, b={b}")]
    UnsupportedGainSum { a: i64, b: i64 },

    #[error("invalid weighted tree: {0}")]
    BadWeightedTree(String),

    #[error("weight constraint violated on {0} edge(s)")]
    WeightViolation(usize),

    #[error("polynomial degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },

    #[error("expected a polynomial of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: String },

    #[error("instance too large: {0}")]
    GuardViolation(String),

    #[error("{0} is not an admissible prime here (need a prime q > {1})")]
    BadPrime(u64, u64),

    #[error("need at least {needed} interpolation points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },

    #[error("interpolation inconsistency: {0}")]
    InterpolationFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
