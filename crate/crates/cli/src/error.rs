use std::fmt;

use crate::sexpr::Pos;

/// A scenario error with the position it refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub pos: Pos,
    pub msg: String,
}

impl DslError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> DslError {
        DslError {
            pos,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for DslError {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unknown suite {0}")]
    UnknownSuite(String),
}
