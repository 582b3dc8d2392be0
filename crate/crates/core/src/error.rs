use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Lattice too small or above the configured site cap.
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A state that violates a precondition, typically normalization.
    #[error("state error: {0}")]
    State(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Invalid noise model, e.g. a kernel that is not positive semidefinite.
    #[error("noise model error: {0}")]
    Model(String),
    /// The request exceeds what the implementation supports (e.g. dense ensemble matrices).
    #[error("capability error: {0}")]
    Capability(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
