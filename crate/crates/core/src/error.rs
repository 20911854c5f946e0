use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex budget exceeded: {requested} > {budget}")]
    VertexBudget { requested: u128, budget: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: String },
    #[error("graph too large for brute force: {n} > {max}")]
    TooLarge { n: usize, max: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("method {method} failed on graph {graph_id}: {msg}")]
    MethodFailed {
        method: String,
        graph_id: String,
        msg: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short identifier for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SelfLoop(_) => "self_loop",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::VertexBudget { .. } => "vertex_budget",
            Error::Parse { .. } => "parse",
            Error::Dimension { .. } => "dimension",
            Error::NonFinite { .. } => "non_finite",
            Error::TooLarge { .. } => "too_large",
            Error::EmptyDataset => "empty_dataset",
            Error::UnknownMethod(_) => "unknown_method",
            Error::MethodFailed { .. } => "method_failed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
