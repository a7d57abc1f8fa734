use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),

    #[error("duplicate edge {0}")]
    DuplicateEdge(String),

    #[error("self-loop at node `{0}`")]
    SelfLoop(String),

    #[error("{what} has size {size}, exceeding the configured limit {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing value for variable {0}")]
    MissingVariable(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("operation requires an acyclic graph: {0}")]
    Cyclic(String),

    #[error("coefficients of node `{node}` are identified but the linear system is degenerate at this covariance matrix")]
    Degenerate { node: String },

    #[error("matrix format: {0}")]
    Matrix(String),
}
