use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (length, shape, range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("value {value} outside the transform domain")]
    Domain { value: f64 },

    #[error("missing value at hour index {index} of cell {cell}")]
    Missing { cell: String, index: usize },

    #[error("timestamp {0} not covered by the series")]
    NotCovered(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{} malformed row(s); {}", .0.len(), list_issues(.0))]
    Malformed(Vec<ParseIssue>),

    #[error("cluster {cluster}: {source}")]
    Cluster {
        cluster: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("forecast block {block}: {source}")]
    Block {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// A rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseIssue {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

const LISTED_ISSUES: usize = 20;

fn list_issues(issues: &[ParseIssue]) -> String {
    let mut out: Vec<String> = issues.iter().take(LISTED_ISSUES).map(ToString::to_string).collect();
    if issues.len() > LISTED_ISSUES {
        out.push(format!("and {} more", issues.len() - LISTED_ISSUES));
    }
    out.join("; ")
}
