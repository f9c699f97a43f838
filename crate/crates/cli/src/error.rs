use std::path::PathBuf;

use thiserror::Error;

/// Failures reported by the command-line tool. All of them exit with code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column} (field `{path}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read `{}`: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write `{}`: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failed: {0}")]
    Solver(#[from] specdist::Error),
}

impl CliError {
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Prefixes the field path with the name of the argument it came from.
    pub fn within(self, outer: &str) -> Self {
        match self {
            CliError::Parse {
                line,
                column,
                path,
                message,
            } => CliError::Parse {
                line,
                column,
                path: if path == "." { outer.to_string() } else { format!("{outer}.{path}") },
                message,
            },
            CliError::Validation { field, message } => CliError::Validation {
                field: format!("{outer}.{field}"),
                message,
            },
            other => other,
        }
    }
}
