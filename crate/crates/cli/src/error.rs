use std::fmt;

/// A failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameter values (exit 2).
    Config(String),
    /// A numerical routine failed or an invariant check did not hold (exit 3).
    Numerical(String),
    /// Reading or writing files (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<heisproj::Error> for CliError {
    fn from(e: heisproj::Error) -> Self {
        use heisproj::Error as E;
        let message = e.to_string();
        match e.root() {
            E::InvalidParameter { .. } | E::EmptyDomain | E::FrequencyOutOfBand { .. } => CliError::Config(message),
            E::Io { .. } | E::Parse { .. } => CliError::Io(message),
            _ => CliError::Numerical(message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
