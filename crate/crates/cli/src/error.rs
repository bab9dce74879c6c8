use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Library(#[from] sqjoin::Error),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Library(_) => 1,
            CliError::Check(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) | CliError::Library(_) => "validation",
            CliError::Check(_) => "check",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let witness = match self {
            CliError::Library(sqjoin::Error::NotAMetric { witness, .. })
            | CliError::Library(sqjoin::Error::NotInvariant { witness, .. }) => {
                Some(witness.clone())
            }
            _ => None,
        };
        let mut body =
            json!({ "kind": self.kind(), "code": self.exit_code(), "message": self.to_string() });
        if let Some(w) = witness {
            body["witness"] = json!(w);
        }
        json!({ "error": body }).to_string()
    }
}
