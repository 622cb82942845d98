//! Error type shared by the library and the CLI, with a stable mapping to
//! process exit codes: 0 success, 1 I/O or transport, 2 format/validation.

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] figcap_core::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("HTTP: {0}")]
    Http(#[from] reqwest::Error),
    #[error("refiner: {0}")]
    Refiner(String),
}

impl Error {
    /// Exit code contract: 1 for I/O and transport failures, 2 for anything
    /// format- or validation-shaped.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Http(_) | Error::Refiner(_) => 1,
            _ => 2,
        }
    }

    /// Wraps an I/O error with the path it happened on.
    pub fn io_at(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(
            source.kind(),
            format!("{}: {source}", path.display()),
        ))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
