use std::io;

use thiserror::Error;

/// Toolkit-wide error type.
///
/// Variants map onto the process exit codes used by the `cmx` binary:
/// usage errors exit 1, data/validation errors exit 2, I/O errors exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller asked for something the toolkit cannot do (bad flags,
    /// missing preconditions, mode conflicts).
    #[error("{0}")]
    Usage(String),

    /// Malformed input data with no better anchor than a message.
    #[error("{0}")]
    Data(String),

    /// Malformed input data at a known 1-based line.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A record failed validation; names the offending uid.
    #[error("record `{uid}`: {msg}")]
    Record { uid: String, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn record(uid: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Record {
            uid: uid.into(),
            msg: msg.into(),
        }
    }

    /// True for data/validation errors (as opposed to usage or I/O).
    pub fn is_data(&self) -> bool {
        matches!(
            self,
            Error::Data(_) | Error::Parse { .. } | Error::Record { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
