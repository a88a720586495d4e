use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator `{token}` in word `{word}`")]
    UnknownGenerator { token: String, word: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("restriction support is not contained in the pattern support")]
    SupportMismatch,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("power iteration did not converge after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("forbidden support spans {span} cells but memory {memory} only covers {} cells", memory + 1)]
    MemoryTooSmall { span: usize, memory: usize },

    #[error("embedding is not injective: `{first}` and `{second}` have the same image")]
    EmbeddingNotInjective { first: String, second: String },

    #[error("coset decomposition check failed: {0}")]
    CosetCheckFailed(String),

    #[error("window pattern is not in the cocycle table (generator `{generator}`)")]
    PatternNotInTable { generator: String },

    #[error("evaluation escapes the available support: {0}")]
    InsufficientData(String),

    #[error("no locally admissible completion for tile {tile} with boundary {boundary}")]
    NoCompletion { tile: usize, boundary: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("oracle process failed: {0}")]
    Oracle(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit(_) => 3,
            Error::NonConvergence { .. } => 4,
            _ => 2,
        }
    }
}
