use thiserror::Error;

/// Errors raised by the library. Parse problems are kept apart from semantic
/// ones so front ends can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partitions {0} and {1} are not compatible")]
    Incompatible(usize, usize),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },

    #[error("labels do not commute: {0}")]
    NotCommuting(String),

    #[error("label set is not a maximal commuting set: {0}")]
    NotMaximal(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("degenerate parallelotope: {0}")]
    Degenerate(String),

    #[error("inconsistent shear indexing: {0}")]
    ShearIndex(String),

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
