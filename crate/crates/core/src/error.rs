use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A structural assumption on a measure, coefficient or flux failed.
    #[error("invalid `{parameter}`: {reason}")]
    Validation { parameter: String, reason: String },

    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    /// Caller broke an operation contract (grid mismatch, support, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("CFL violation: dt = {dt:e} exceeds the stable bound {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("non-finite value at t = {time} in cell {cell}")]
    BlowUp { time: f64, cell: usize },

    #[error("{}", format_config(.line, .message))]
    Config {
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn format_config(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("config line {l}: {message}"),
        None => format!("config: {message}"),
    }
}

impl Error {
    pub(crate) fn validation(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            parameter: parameter.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn argument(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
