use core::fmt;

/// Errors produced by the core operations.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// An argument violated an operation's precondition.
    InvalidArgument(&'static str),
    /// Length-ratio normalization was requested against an empty reference.
    UndefinedNormalization,
    /// No figure or table reference was found in any mention.
    NoReference,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::UndefinedNormalization => {
                write!(f, "length-ratio normalization is undefined for an empty reference")
            }
            Error::NoReference => write!(f, "no figure or table reference found in mentions"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
