use thiserror::Error;

use crate::ultragraph::EdgeId;

/// Errors raised by model queries and constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("duplicate family `{0}`")]
    DuplicateFamily(String),
    #[error("edge {0} is outside its family's index domain")]
    EdgeOutOfDomain(EdgeId),
    #[error("vertex {family}[{index}] is outside its family's index domain")]
    VertexOutOfDomain { family: String, index: u64 },
    #[error("edge family `{family}`: {message}")]
    InvalidEdgeFamily { family: String, message: String },
    #[error("sink detected: vertex {0} emits no edges")]
    Sink(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("{0} is not a minimal infinite emitter")]
    NotMinimalEmitter(String),
    #[error("grading violated on edge family `{family}`: {message}")]
    GradingViolation { family: String, message: String },
    #[error("finite edge set is not contained in ε of the cylinder terminal")]
    EdgesOutsideEpsilon,
    #[error("insufficient occurrence metadata: {0}")]
    InsufficientMetadata(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
