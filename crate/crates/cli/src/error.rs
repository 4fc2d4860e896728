use thiserror::Error;

/// Everything that can stop a run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Math(_) => 1,
        }
    }
}

impl From<lorentz_iso::Error> for CliError {
    fn from(e: lorentz_iso::Error) -> Self {
        use lorentz_iso::Error as E;
        match e {
            E::InvalidInput(_) | E::Domain(_) | E::EmptyDomain | E::UnsupportedDomain(_) => Self::Config(e.to_string()),
            E::Numeric(_) | E::Degenerate(_) | E::Inadmissible { .. } | E::Precondition(_) => Self::Math(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
