use thiserror::Error;

/// Errors raised while building or checking instances and schedules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Format(String),
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownEndpoint { edge: String, vertex: String },
    #[error("negative weight on {kind} `{id}`")]
    NegativeWeight { kind: &'static str, id: String },
    #[error("weight of {kind} `{id}` does not fit the weight type")]
    WeightRange { kind: &'static str, id: String },
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("edges `{0}` and `{1}` join the same pair of vertices")]
    MultiEdge(String, String),
    #[error("graph is disconnected: `{0}` is unreachable from the start vertex")]
    Disconnected(String),
    #[error("start vertex `{0}` does not exist")]
    UnknownStart(String),
    #[error("total demand plus the heaviest edge overflows the weight type")]
    Overflow,
    #[error("instance is not a tree: it contains a cycle")]
    Cycle,
    #[error("vertex `{0}` is not a leaf")]
    NotALeaf(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("schedule starts at `{found}` but the instance starts at `{expected}`")]
    StartMismatch { expected: String, found: String },
    #[error("step {step}: {reason}")]
    InvalidWalk { step: usize, reason: String },
    #[error("instance has {vertices} vertices, above the oracle cap of {cap}")]
    CapExceeded { vertices: usize, cap: usize },
    #[error("malformed exact-cover input: {0}")]
    Xc3(String),
    #[error("leaf order is inconsistent with the tree: {0}")]
    InconsistentOrder(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
