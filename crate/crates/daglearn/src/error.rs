//! Error type shared by all modules of the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building models, querying tables,
/// scoring, searching, or reading and writing files.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable index {index} is out of range for {n_variables} variables")]
    UnknownVariable { index: usize, n_variables: usize },

    #[error("ordering violation: parent {parent} does not precede child {child}")]
    OrderViolation { child: usize, parent: usize },

    #[error("out of range: {detail}")]
    OutOfRange { detail: String },

    #[error("invalid argument: {detail}")]
    InvalidArgument { detail: String },

    #[error("CPT for node {child} has no defined row {row} but that row is reachable")]
    UndefinedCptRow { child: usize, row: usize },

    #[error("state space has {cells} cells, more than the supported maximum of {limit}")]
    StateSpaceTooLarge { cells: u128, limit: usize },

    #[error("scopes overlap: {detail}")]
    ScopeOverlap { detail: String },

    #[error("parent sets are not nested: {detail}")]
    NotNested { detail: String },

    #[error("decision rule does not match the evaluator input: {detail}")]
    RuleInputMismatch { detail: String },

    #[error("node {node} has {count} predecessors, exhaustive search supports at most {limit}")]
    TooManyPredecessors {
        node: usize,
        count: usize,
        limit: usize,
    },

    #[error("domain error: {detail}")]
    DomainError { detail: String },

    #[error("dataset contains no rows")]
    EmptyDataset,

    #[error("row at line {line} has {found} cells, expected {expected}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("missing cell at line {line} in column {column:?}")]
    MissingCell { line: u64, column: String },

    #[error("column {column:?} is constant; pass allow_constant to accept it")]
    CardinalityOne { column: String },

    #[error("schema error at {path}: {detail}")]
    SchemaError { path: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        Error::InvalidArgument {
            detail: detail.into(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::SchemaError {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
