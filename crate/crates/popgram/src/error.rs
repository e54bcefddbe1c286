//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus: no patterns left after normalization")]
    EmptyCorpus,

    #[error("encoding error on line {line}: input is not valid UTF-8")]
    Encoding { line: u64 },

    #[error("unknown token {surface:?}")]
    UnknownToken { surface: String },

    #[error("token id {id} out of range")]
    UnknownTokenId { id: u32 },

    #[error("unknown pattern id {id}")]
    UnknownPattern { id: u32 },

    #[error("empty candidate")]
    EmptyCandidate,

    #[error("candidate has {len} token(s), need at least 2")]
    CandidateTooShort { len: usize },

    #[error("candidates have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error("empty population: cannot delete every pattern")]
    EmptyPopulation,

    #[error("deletion schedule exhausts the corpus at step {step}")]
    ExhaustedCorpus { step: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status class: 1 for usage/config problems, 2 for data problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}
