use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (mismatched block counts, bad JSON, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation was called outside the range where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector that was required to lie in a subspace does not.
    #[error("image vector {vector} is not contained in the codomain span")]
    Containment { vector: String },

    /// A mathematical invariant that the construction relies on failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
