use std::path::PathBuf;

use crate::float::FloatFormat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} out of range: {value} (allowed {allowed})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        allowed: &'static str,
    },

    #[error("format mismatch: {left} vs {right}")]
    FormatMismatch { left: FloatFormat, right: FloatFormat },

    #[error("cannot convert {0} to an integer")]
    InvalidConversion(String),

    #[error("no named format has {exp_bits} exponent bits and at least {man_bits} mantissa bits")]
    NoNamedFormat { exp_bits: u32, man_bits: u32 },

    #[error("unbalanced region: {0}")]
    RegionImbalance(&'static str),

    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("invalid input for {kernel}: {reason}")]
    InvalidInput { kernel: &'static str, reason: String },

    #[error("variable `{0}` has no precision binding")]
    UnboundVariable(String),

    #[error("configuration binds {got} variables, kernel `{kernel}` declares {expected}")]
    BindingCount {
        kernel: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("output lengths differ: reference {reference}, test {test}")]
    LengthMismatch { reference: usize, test: usize },

    #[error("threshold {0} cannot be met even at full precision")]
    Infeasible(f64),

    #[error("invalid threshold {0}: must be positive")]
    InvalidThreshold(f64),

    #[error("cost table has no entry for {0}")]
    MissingTableEntry(String),

    #[error("baseline {0} is zero")]
    DivisionByZeroBaseline(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
