use thiserror::Error;

/// Errors produced while building, loading or querying an index.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus contains no indexable tokens")]
    EmptyCorpus,

    #[error("document {doc} has {tokens} tokens, more than the configured maximum of {max}")]
    DocumentTooLong { doc: usize, tokens: usize, max: usize },

    #[error("query file line {line}: {reason}")]
    QueryParse { line: usize, reason: String },

    #[error("{what} index {index} out of range (valid: {valid})")]
    OutOfRange { what: &'static str, index: u64, valid: String },

    #[error("truncated {0} stream")]
    Truncated(&'static str),

    #[error("corrupt {codec} stream: {reason}")]
    Corrupt { codec: &'static str, reason: String },

    #[error("gap value 0 cannot be encoded by {0}")]
    ZeroGap(&'static str),

    #[error("invalid grammar symbol {0}")]
    InvalidSymbol(u64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("algorithm `{algorithm}` cannot run over `{representation}`; valid algorithms: {valid}")]
    IncompatibleAlgorithm {
        algorithm: String,
        representation: String,
        valid: String,
    },

    #[error("bad index image: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
