use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Prefixes the message with the parameter point that produced it.
    pub fn at(self, point: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{point}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{point}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{point}: {m}")),
        }
    }
}

impl From<optomech::Error> for CliError {
    fn from(e: optomech::Error) -> Self {
        use optomech::Error as E;
        match e {
            _ if e.is_instability() => CliError::Solver(e.to_string()),
            E::NotConverged(_) | E::CrossCheck(_) | E::Numerical(_) | E::WitnessBound(_) => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
