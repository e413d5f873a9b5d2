use thiserror::Error;

/// Failures of a command, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid configuration, bad usage, unreadable input.
    #[error("config error: {0}")]
    Config(String),
    /// `birth:±` requested as initial state but that birth space is not
    /// one-dimensional.
    #[error("{0}")]
    TrivialBirth(String),
    /// The coin field breaks a standing hypothesis (a vanishing component
    /// of χ).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    /// A sweep point where the classification disagrees with the closed-form
    /// prediction.
    #[error("{0} sweep point(s) disagree with the prediction")]
    Disagreement(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::TrivialBirth(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Disagreement(_) => 4,
        }
    }
}

impl From<speclab_core::Error> for CliError {
    fn from(e: speclab_core::Error) -> Self {
        match e {
            speclab_core::Error::ChiComponentVanishes(_) => CliError::Hypothesis(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
