use thiserror::Error;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("cannot parse scenario: {0}")]
    Parse(String),

    #[error("{}", core_message(.context, .source))]
    Core {
        context: String,
        #[source]
        source: gradobs_core::Error,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<gradobs_core::Error> for CliError {
    fn from(source: gradobs_core::Error) -> Self {
        CliError::Core {
            context: String::new(),
            source,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// Prefixes the message with the location of the offending scenario entry.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Core { context, source } if context.is_empty() => CliError::Core {
                context: what.to_string(),
                source,
            },
            CliError::Core { context, source } => CliError::Core {
                context: format!("{what}.{context}"),
                source,
            },
            CliError::Config(msg) => CliError::Config(format!("{what}: {msg}")),
            other => other,
        }
    }

    /// The core error behind this one, if any.
    pub fn core(&self) -> Option<&gradobs_core::Error> {
        match self {
            CliError::Core { source, .. } => Some(source),
            _ => None,
        }
    }
}

fn core_message(context: &str, source: &gradobs_core::Error) -> String {
    if context.is_empty() {
        source.to_string()
    } else {
        format!("{context}: {source}")
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
