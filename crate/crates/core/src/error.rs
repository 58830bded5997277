use thiserror::Error;

use crate::crossover::Incompatibility;
use crate::graph::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid IOD graph: {0}")]
    InvalidGraph(ValidationReport),

    #[error("invalid IO partition: {0}")]
    InvalidPartition(String),

    #[error("partitions are not crossover compatible: {0}")]
    Incompatible(Incompatibility),

    #[error("invalid crossover membrane: {0}")]
    InvalidMembrane(String),

    #[error("no tag-respecting perfect matching of {kind} links exists")]
    TagMatchingInfeasible { kind: &'static str },

    #[error("no compatible partition pair found after examining {examined} candidates")]
    NoCompatiblePartitions { examined: usize },

    #[error("budget exceeded: {required} items required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("construction parameters out of range: {0}")]
    Construction(String),

    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("DOT parse error at line {line}: {message}")]
    Dot { line: usize, message: String },
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
