use hbvm::HbvmError;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("evaluation failure: {0}")]
    Evaluation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Evaluation(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn with_context(self, ctx: String) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{ctx}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{ctx}: {m}")),
            CliError::Evaluation(m) => CliError::Evaluation(format!("{ctx}: {m}")),
            io => io,
        }
    }
}

impl From<HbvmError> for CliError {
    fn from(e: HbvmError) -> Self {
        match e {
            HbvmError::NonConvergence { .. } | HbvmError::Singular => {
                CliError::Solver(e.to_string())
            }
            HbvmError::EvaluationFailure(_) => CliError::Evaluation(e.to_string()),
            HbvmError::Domain(_)
            | HbvmError::Argument(_)
            | HbvmError::Resource(_)
            | HbvmError::Dimension { .. } => CliError::Usage(e.to_string()),
        }
    }
}
