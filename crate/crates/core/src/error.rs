use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters, grids or configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A configuration line could not be parsed.
    #[error("config line {line}, key `{key}`: {msg}")]
    ConfigKey { line: usize, key: String, msg: String },

    /// Quadrature failed to converge or a solver produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("numerical failure at step {step} (t = {time:e} s): {msg}")]
    NonFinite { step: usize, time: f64, msg: String },

    /// A formula was evaluated where its denominator vanishes.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was asked for outside the regime where it is defined.
    #[error("regime error: {0}")]
    Regime(String),

    /// The input carries no excitation, so ratios are undefined.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ConfigKey { .. } | Error::Io(_) => 1,
            Error::Numerical(_) | Error::NonFinite { .. } => 2,
            Error::Validation(_) => 3,
            Error::Domain(_) | Error::Regime(_) | Error::DegenerateInput(_) => 2,
        }
    }
}
