use std::path::PathBuf;

/// Crate-wide error type.
///
/// Variants are grouped by how a caller should react: `Domain`, `Structure`,
/// `Parse`, `Unsupported` and the I/O wrappers are input/validation problems,
/// while `Numerical` signals a failed computation (non-finite values) that no
/// input fix at the call site can repair.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A scalar argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are individually valid but mutually inconsistent
    /// (shape mismatch, mismatched match-id sets, bad topology).
    #[error("structural error: {0}")]
    Structure(String),

    /// A file could not be parsed against its schema.
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// The operation is not defined for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A computation produced non-finite values and was aborted.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad inputs rather than failed computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
