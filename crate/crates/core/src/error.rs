use thiserror::Error;

/// Errors raised by graph construction and the algorithms built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} has degree {degree}, exceeding the bound {bound}")]
    DegreeOverflow {
        vertex: usize,
        degree: usize,
        bound: usize,
    },

    #[error("infeasible generator parameters: {0}")]
    InfeasibleFamily(String),

    #[error("rooted ball has {size} vertices, above the canonicalization cap {cap}")]
    BallTooLarge { size: usize, cap: usize },

    #[error("labeling provides {available} bits but {requested} were requested")]
    LabelingTooShallow { requested: usize, available: usize },

    #[error("labeling covers {labels} vertices but the graph has {n}")]
    LabelingSizeMismatch { labels: usize, n: usize },

    #[error("labeling is not certified distinct within radius {radius}")]
    NotCertified { radius: usize },

    #[error("labels of vertices {x} and {y} coincide within radius {radius}")]
    LabelCollision { x: usize, y: usize, radius: usize },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("graph on {size} vertices exceeds the exact-solver cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
