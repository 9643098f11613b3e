use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data rejected by validation.
    #[error("invalid input")]
    Input(#[source] bhcast_core::Error),

    #[error("{context}")]
    Run {
        context: String,
        #[source]
        source: bhcast_core::Error,
    },

    #[error("{failed} of {total} grid cells failed")]
    CellsFailed { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn run(context: impl Into<String>) -> impl FnOnce(bhcast_core::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Run { context, source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Run { .. } | CliError::CellsFailed { .. } | CliError::Io(_) => 2,
        }
    }
}
