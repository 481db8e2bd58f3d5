use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the analysis routines.
///
/// Variants name the operation that rejected its input so the CLI can surface
/// the failing step without extra bookkeeping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("build_graph: duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),

    #[error("build_graph: edge ({source_label}, {target}) has non-positive weight {weight}")]
    NonPositiveWeight {
        source_label: String,
        target: String,
        weight: f64,
    },

    #[error("{op}: unknown node '{label}'")]
    UnknownNode { op: &'static str, label: String },

    #[error("transition_matrix: dead-end nodes with zero out-degree: {}", .0.join(", "))]
    DeadEnds(Vec<String>),

    #[error("{op}: graph is not strongly connected ({components} strong components); restrict to the largest strong component first")]
    NotStronglyConnected { op: &'static str, components: usize },

    #[error("{op}: graph is not connected ({components} components); restrict to the largest component first")]
    NotConnected { op: &'static str, components: usize },

    #[error("{op}: requires an undirected graph")]
    DirectedGraph { op: &'static str },

    #[error("{op}: did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        op: &'static str,
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("{op}: matrix is not symmetric (max asymmetry {defect:e})")]
    Asymmetric { op: &'static str, defect: f64 },

    #[error("laplacian ({kind}): {requirement}")]
    LaplacianPrecondition {
        kind: &'static str,
        requirement: String,
    },

    #[error("{op}: dimension mismatch (expected {expected}, got {actual})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{op}: {reason}")]
    InvalidInput { op: &'static str, reason: String },

    #[error("{op}: degenerate polygon with zero area")]
    DegeneratePolygon { op: &'static str },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: line {line}: {reason}")]
    Parse {
        context: String,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(op: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
