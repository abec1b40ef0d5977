//! File formats, run configuration and the command implementations behind
//! the `hullmert` binary. Commands return their output as text so they can
//! be tested without spawning a process.

mod commands;
mod config;
mod format;
pub mod json;
pub mod verify;

use std::fmt;

pub use commands::{cmd_linesearch, cmd_optimize, cmd_sweep, cmd_validate, cmd_verify, parse_range, Loaded, Output};
pub use config::{densify_with_warning, parse_sparse, Directions, RunConfig, SelectionId, DEFAULT_ITERATIONS};
pub use format::{CorpusFile, EdgeDoc, FeatureIndex, ForestDoc, Origin};
pub use verify::VerifyOptions;

use crate::error::Error;

/// Failure class, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Invariant,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Invariant => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Invariant,
            message: message.into(),
        }
    }

    pub fn context(mut self, prefix: impl fmt::Display) -> Self {
        self.message = format!("{prefix}: {}", self.message);
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Invariant(_) | Error::ProvenanceMismatch(_) => ErrorKind::Invariant,
            Error::InvalidArgument(_) => ErrorKind::Usage,
            _ => ErrorKind::Data,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global
/// pool when `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::invariant(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
