use thiserror::Error;

use crate::graph::Edge;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("strings have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("second string is not a letter permutation of the first")]
    PermutationMismatch,
    #[error("strings must be non-empty")]
    EmptyString,
    #[error("edge {edge} out of range for graph with {n_a} A-nodes and {n_b} B-nodes")]
    IndexOutOfRange { edge: Edge, n_a: usize, n_b: usize },
    #[error("edges {0} and {1} share an endpoint")]
    NotAMatching(Edge, Edge),
    #[error("matching is not consecutive: {0} and {1} conflict")]
    InvalidMatching(Edge, Edge),
    #[error("edge {0} was already removed")]
    EdgeAlreadyRemoved(Edge),
    #[error("edge {0} is not in the graph")]
    UnknownEdge(Edge),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("epsilon must be a finite positive number, got {0}")]
    EpsilonOutOfRange(f64),
    #[error("projected {projected} candidate evaluations exceed the budget of {budget}")]
    SizeGuard { projected: u128, budget: u128 },
    #[error("instance has {edges} edges, exact solver cap is {cap}")]
    InstanceTooLarge { edges: usize, cap: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
