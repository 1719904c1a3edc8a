use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has zero nodes")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node} is outside a graph of {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("view covers {view_nodes} nodes but the graph has {graph_nodes}")]
    ViewMismatch {
        view_nodes: usize,
        graph_nodes: usize,
    },

    #[error("trace does not belong to this graph or view: {0}")]
    TraceMismatch(String),

    #[error("requested {requested} seeds but only {available} visible nodes exist")]
    NotEnoughNodes { requested: usize, available: usize },

    #[error("graph has {edges} edges; exact enumeration supports at most {limit}")]
    TooLargeForEnumeration { edges: usize, limit: usize },

    #[error("sample {sample_id} has zero observed+phantom cascade mass")]
    ZeroDenominator { sample_id: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
