use std::fmt;

/// Location and cause of a malformed line in one of the four circuit files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub file: String,
    /// 1-based line number; 0 when the problem is the file as a whole.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(file: &str, line: usize, message: impl Into<String>) -> Self {
        Self { file: file.to_string(), line, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.file, self.message)
        } else {
            write!(f, "{}:{}: {}", self.file, self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid operator `{name}`: {reason}")]
    InvalidOperator { name: String, reason: String },

    #[error(
        "dense state of {width} bits needs {bytes} bytes (2^{width} amplitudes x 16 bytes), \
         budget is {budget} bytes"
    )]
    Capacity { width: u32, bytes: u128, budget: u128 },

    #[error("numerical degeneracy: {0}")]
    Numeric(String),

    #[error("hybrid mode: {0}")]
    Hybrid(String),

    #[error("recursive kernel supports at most {limit} operations (circuit has {ops}); use the iterative kernel")]
    DepthLimit { ops: usize, limit: usize },

    #[error("enumeration guard exceeded: {0}")]
    Guard(String),

    #[error("empty probability distribution")]
    EmptyDistribution,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Numeric(_) => 3,
            Error::Capacity { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
