use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph {graph}: edge {edge} references undeclared vertex {vertex}")]
    UndeclaredVertex { graph: u64, edge: u64, vertex: u64 },

    #[error("duplicate graph id {0}")]
    DuplicateGraph(u64),

    #[error("label `{0}` is missing from the dictionary")]
    DictionaryMiss(String),

    #[error("label id {0} is missing from the dictionary")]
    UnknownLabelId(u32),

    #[error("value {value} at position {position} exceeds the 28-bit range")]
    ValueOutOfRange { position: usize, value: u32 },

    #[error("corrupt compressed block: {0}")]
    CorruptBlock(&'static str),

    #[error("compression ratio is undefined for an empty block set")]
    UndefinedRatio,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle refuses graph {graph}: enumeration depth {depth} exceeds the guard of {guard} edges")]
    GuardExceeded { graph: u64, depth: usize, guard: usize },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
