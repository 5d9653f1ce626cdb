use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("enumeration cap exceeded: {cap} would need {requested}, limit is {limit}")]
    CapExceeded {
        cap: &'static str,
        requested: String,
        limit: u64,
    },

    #[error("invalid vertex: {0}")]
    InvalidVertex(String),

    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("exponent underflow: {0}")]
    ExponentUnderflow(String),

    #[error("distribution is not normalized: total mass {0}")]
    NotNormalized(String),

    #[error("infeasible certificate: {0}")]
    Infeasible(String),

    #[error("corrupt index: {0}")]
    CorruptIndex(String),

    #[error("query {query} outside universe [1, {universe}]")]
    QueryOutOfUniverse { query: u64, universe: u64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn cap(cap: &'static str, requested: impl ToString, limit: u64) -> Self {
        Error::CapExceeded {
            cap,
            requested: requested.to_string(),
            limit,
        }
    }
}
