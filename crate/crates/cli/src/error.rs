use std::path::PathBuf;

use thiserror::Error;

/// CLI failure; [`CliError::exit_code`] maps it onto the process status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerics(#[from] heatgrow_core::Error),
}

impl CliError {
    pub fn config(origin: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            origin: origin.into(),
            message: message.into(),
        }
    }

    /// 2 configuration, 3 divergence, 4 kernel range, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use heatgrow_core::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerics(E::Divergence { .. }) => 3,
            CliError::Numerics(E::KernelRange(_)) => 4,
            CliError::Numerics(
                E::InvalidParameter { .. } | E::InvalidTime { .. } | E::InvalidState(_),
            ) => 2,
            CliError::Numerics(_) | CliError::Io { .. } => 1,
        }
    }
}
