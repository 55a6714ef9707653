use std::io;
use std::path::PathBuf;

/// Everything that ends a run with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] posetal_core::Error),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },

    #[error("malformed JSON in {what}: {source}")]
    Json { what: String, source: serde_json::Error },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Stable machine-readable tag for the error object.
    pub fn kind(&self) -> &'static str {
        use posetal_core::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::AtomOutOfRange { .. } => "atom-out-of-range",
                E::UniverseTooLarge { .. } => "universe-too-large",
                E::InvalidInstance(_) => "invalid-instance",
                E::NotAPermutation | E::PermutationSize { .. } => "invalid-permutation",
                E::UnknownLabel(_) => "unknown-label",
                E::NoArrow => "no-arrow",
                E::NotAMember(_) => "not-a-member",
                E::PoolCapExceeded { .. } => "pool-cap-exceeded",
                E::WrongMode { .. } => "wrong-mode",
                E::OversizedMember { .. } => "oversized-member",
                E::InvalidCovProblem(_) => "invalid-cov-problem",
                E::InvalidEdge { .. } => "invalid-edge",
                E::LimitAbsent(_) => "limit-absent",
            },
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Json { .. } => "malformed-json",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
