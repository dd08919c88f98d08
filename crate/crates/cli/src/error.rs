use std::fmt;

/// Failure classes, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// An invariant check failed.
    Invariant = 1,
    /// Bad flags, config or parameters.
    Usage = 2,
    /// A numerical routine failed.
    Numerical = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Self { kind: Kind::Usage, source: e.into() }
    }

    pub fn numerical(e: impl Into<anyhow::Error>) -> Self {
        Self { kind: Kind::Numerical, source: e.into() }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Invariant, source: anyhow::anyhow!(msg.into()) }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

/// IO problems are reported as usage errors (unwritable output directory,
/// unreadable input).
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e)
    }
}

impl From<hardy_ss_core::Error> for CliError {
    fn from(e: hardy_ss_core::Error) -> Self {
        use hardy_ss_core::Error as E;
        match e {
            E::OutOfRange { .. } | E::InvalidInput(_) => Self::usage(e),
            _ => Self::numerical(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
