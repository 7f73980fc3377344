use thiserror::Error;

/// Errors raised by the graph, estimation, and environment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(usize, usize),
    #[error("node {node} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("node {0} already removed")]
    NodeAlreadyRemoved(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is complete, no edge can be added")]
    CompleteGraph,
    #[error("permutation does not cover the live nodes exactly once")]
    InvalidPermutation,
    #[error("exhaustive enumeration limited to {max} nodes, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("at least one simulation is required")]
    NoSimulations,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("action {0} is not valid in this state")]
    InvalidAction(usize),
    #[error("state is terminal")]
    TerminalState,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot satisfy generator request: {0}")]
    Unsatisfiable(String),
    #[error("no connected sample after {0} attempts")]
    RejectionCapExceeded(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has {got} nodes, outside the accepted range [{min}, {max}]")]
    SizeOutOfRange { got: usize, min: usize, max: usize },
    #[error("io error: {0}")]
    Io(String),
    #[error("policy failed: {0}")]
    Policy(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
