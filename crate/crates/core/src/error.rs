use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("expression is not regular: {0}")]
    NotRegular(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("exploration budget of {0} states exceeded")]
    Budget(usize),

    #[error("net is not safe: {0}")]
    Unsafe(String),

    #[error("chain error: {0}")]
    Chain(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad user input rather than a broken invariant.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
