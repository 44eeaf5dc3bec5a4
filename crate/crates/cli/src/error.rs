use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no set named {0:?} in the problem file")]
    MissingSet(String),
    #[error("unknown gallery entry {0:?}")]
    UnknownGallery(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: phiconv::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn core(context: impl Into<String>) -> impl FnOnce(phiconv::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }
}
