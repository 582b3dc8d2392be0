use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A scenario or flag that fails validation before any computation starts.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: macrostab::Error,
    },
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialize(String),
}

impl From<macrostab::Error> for CliError {
    fn from(source: macrostab::Error) -> Self {
        CliError::Core {
            context: "computation failed".into(),
            source,
        }
    }
}

impl CliError {
    /// 0 ok, 2 validation, 3 numerical, 4 capability; 1 for I/O and other failures.
    pub fn exit_code(&self) -> i32 {
        use macrostab::Error as E;
        match self {
            CliError::Validation(_) | CliError::Parse(_) => 2,
            CliError::Core { source, .. } => match source {
                E::Size(_) | E::Capability(_) => 4,
                E::Argument(_) | E::State(_) | E::Format(_) | E::Model(_) => 2,
                E::Numerical(_) | E::Consistency(_) => 3,
                E::Io(_) => 1,
            },
            CliError::Io(_) | CliError::Serialize(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches scenario context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for Result<T, macrostab::Error> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Core {
            context: what(),
            source,
        })
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        return Err($crate::error::CliError::Validation(format!($($arg)*)))
    };
}
pub(crate) use invalid;
