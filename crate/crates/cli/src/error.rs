use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {element}: {message}")]
    Config { element: String, message: String },
    #[error("numerical failure in {element}: {source}")]
    Numerical {
        element: String,
        #[source]
        source: preq_core::Error,
    },
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

/// Machine-readable form printed on stderr when a run aborts.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub element: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn numerical(element: impl Into<String>) -> impl FnOnce(preq_core::Error) -> CliError {
        let element = element.into();
        move |source| CliError::Numerical { element, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (kind, element, message) = match self {
            CliError::Config { element, message } => ("config", element.clone(), message.clone()),
            CliError::Numerical { element, source } => ("numerical", element.clone(), source.to_string()),
            CliError::Io { path, message } => ("io", path.clone(), message.clone()),
        };
        ErrorRecord {
            error: kind,
            element,
            message,
            exit_code: self.exit_code(),
        }
    }
}
