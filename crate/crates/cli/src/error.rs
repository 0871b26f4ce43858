use serde_json::json;
use thiserror::Error;

/// Exit status for a failed mathematical check.
pub const EXIT_CHECK: i32 = 1;
/// Exit status for configuration and parse errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] nilrec::Error),

    /// A mathematical check ran and failed; its report was already emitted.
    #[error("{message}")]
    Check { kind: &'static str, message: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use nilrec::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Check { kind, .. } => kind,
            CliError::Core(e) => match e {
                E::NotErgodic { .. } => "not-ergodic",
                E::Hypothesis(_) => "hypothesis",
                E::NotIntegerValued(_) => "not-integer-valued",
                E::IrrationalProduct => "irrational-product",
                E::NotNilpotent => "not-nilpotent",
                E::UnknownGenerator(_) | E::DuplicateGenerator(_) | E::RecipeMismatch { .. } => "generator",
                E::LimitExceeded(_) => "limit-exceeded",
                E::DimensionMismatch(_) => "dimension-mismatch",
                E::Unsupported(_) => "unsupported",
                E::Overflow(_) => "overflow",
                E::Parse(_) => "parse",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "not-ergodic" | "hypothesis" | "dependent" | "inconsistent" => EXIT_CHECK,
            _ => EXIT_CONFIG,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut err = json!({ "kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        if let CliError::Core(nilrec::Error::NotErgodic { label, witness }) = self {
            err["system"] = json!(label);
            err["witness"] = json!(witness);
        }
        json!({ "error": err })
    }
}
