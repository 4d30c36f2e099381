use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input; exit code 1.
    #[error("{0}")]
    Input(String),
    /// The engine failed on a well-formed problem; exit code 2.
    #[error("solver failed: {0}")]
    Solver(#[source] proxdist::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        }
    }

    /// Problem construction rejected the data.
    pub fn build(err: proxdist::Error) -> Self {
        CliError::Input(err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl From<proxdist::Error> for CliError {
    fn from(err: proxdist::Error) -> Self {
        CliError::Solver(err)
    }
}
