//! Command-line errors and the process exit code each one maps to.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Filesystem failure on the named path.
    Io { path: PathBuf, source: std::io::Error },
    /// A CSV row that does not parse as `t,price`.
    Parse { path: PathBuf, row: usize, message: String },
    /// Day indices must be consecutive integers.
    Gap { path: PathBuf, row: usize, expected: i64, got: i64 },
    /// Log-scale loading needs strictly positive prices.
    NonPositive { path: PathBuf, row: usize, value: f64 },
    /// A flag value that cannot be interpreted.
    Flag(String),
    /// The manifest file is missing fields or malformed.
    Manifest(String),
    Lib(lppl::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 1 for input and configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(
                lppl::Error::InvalidConfig(_)
                | lppl::Error::DegenerateWindow { .. }
                | lppl::Error::TooFewSamples { .. },
            ) => 1,
            CliError::Lib(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse { path, row, message } => {
                write!(f, "{}:{row}: {message}", path.display())
            }
            CliError::Gap { path, row, expected, got } => {
                write!(f, "{}:{row}: day {got} breaks the sequence (expected {expected})", path.display())
            }
            CliError::NonPositive { path, row, value } => {
                write!(f, "{}:{row}: price {value} is not positive; log scale needs > 0", path.display())
            }
            CliError::Flag(message) => write!(f, "{message}"),
            CliError::Manifest(message) => write!(f, "manifest: {message}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lppl::Error> for CliError {
    fn from(e: lppl::Error) -> Self {
        CliError::Lib(e)
    }
}
