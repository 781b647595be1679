use std::fmt;

use analogy_core::Error;
use serde::{Deserialize, Serialize};

/// Machine-readable failure shared by the CLI and the HTTP service.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    /// Stable code such as `unknown_token` or `invalid_parameter`.
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            error: code.to_owned(),
            message: message.into(),
            token: None,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        ApiError::new("invalid_parameter", message)
    }

    pub fn usage(message: impl Into<String>) -> Self {
        ApiError::new("usage", message)
    }

    pub fn not_found(path: &str) -> Self {
        ApiError::new("not_found", format!("no route for {path}"))
    }

    /// 1 for I/O and parse failures, 2 for everything the caller asked for
    /// that could not be resolved.
    pub fn exit_code(&self) -> u8 {
        match self.error.as_str() {
            "io" | "parse" => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => "io",
            Error::UnknownToken(t) => {
                return ApiError {
                    error: "unknown_token".into(),
                    message: format!("unknown token {t:?}: not in the vocabulary"),
                    token: Some(t.clone()),
                }
            }
            Error::InvalidParameter(_) | Error::InvalidCutoff => "invalid_parameter",
            Error::EmptyView | Error::EmptyCandidates => "empty_candidates",
            Error::ZeroNorm => "zero_norm",
            Error::MalformedHeader(_)
            | Error::MalformedRecord { .. }
            | Error::CountMismatch { .. }
            | Error::TrailingData(_)
            | Error::DuplicateToken(_)
            | Error::InvalidToken(_)
            | Error::ZeroVector(_)
            | Error::ZeroDimension
            | Error::EmptySet
            | Error::DimMismatch(..)
            | Error::DatasetSyntax { .. }
            | Error::EmptyDataset => "parse",
        };
        ApiError::new(code, e.to_string())
    }
}
